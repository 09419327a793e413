#ifndef FCMVRP_LP_FORMAT_HPP
#define FCMVRP_LP_FORMAT_HPP

#include <string>

#include "fcmvrp/milp.hpp"

namespace fcmvrp {

/// CPLEX-style LP text format, so external solvers can cross-check models.
/// Constraint tags are emitted as comment lines (\ tag=eq3) right before
/// each row and recovered by the parser; numbers use shortest exact
/// round-trip notation, so write -> parse is lossless.
std::string write_lp(const MilpModel& model);

void write_lp_file(const MilpModel& model, const std::string& path);

MilpModel parse_lp(const std::string& text);

} // namespace fcmvrp

#endif
