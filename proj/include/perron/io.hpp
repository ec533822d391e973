#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <string>
#include <vector>

#include "perron/graph.hpp"

namespace perron {

/// Fixed 17-significant-digit scientific formatting used by every CSV writer,
/// so identical runs produce byte-identical files.
std::string format_double(double v);

/// Header fragment "prefix1,...,prefixn".
std::string coordinate_header(const std::string& prefix, int n);

/// Comma-separated coordinates of v (no leading comma).
std::string format_vector(const Eigen::VectorXd& v);

/// Columns: kind, T, zm1..zmn, zp1..zpn, g1..gn, residual, iterations. The
/// domain point goes into the zm (F_inf) or zp (G_inf, G_T) block; G_T rows
/// carry their fiber point in zm.
void write_graph_csv(std::ostream& os, const GraphSample& g);

}  // namespace perron
