#pragma once

#include <string>
#include <vector>

#include "largesol/field2d.hpp"
#include "largesol/radial.hpp"

namespace largesol {

/// Field CSV layout: a scalar header (names then values: r_in, R, n_r,
/// n_theta, k), a column header, then one row per node
/// (i_r, i_theta, r, theta, u). Values are printed round-trip exact.
void write_field_csv(const PolarField& f, const std::string& path);
PolarField read_field_csv(const std::string& path);

/// Profile CSV layout: scalar header (R, N, n_r, method, k_level), column
/// header, rows (i, r, u, du).
void write_profile_csv(const RadialProfile& p, const std::string& path);
RadialProfile read_profile_csv(const std::string& path);

/// Plain two-column plot data.
void write_xy(const std::string& path, const std::vector<double>& x,
              const std::vector<double>& y);

/// Per-theta inner ring data (annulus runs), one value per line.
void write_inner_data(const std::string& path, const std::vector<double>& data);

} // namespace largesol
