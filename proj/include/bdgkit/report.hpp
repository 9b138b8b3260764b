#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace bdgkit {

/// One tested inequality lhs <= C · rhs.
///
/// C is tracked_constant when the proof being replayed displays one, otherwise
/// the suite-configured cap. pass is derived by finalize(): lhs <= C·rhs up to
/// a relative round-off allowance, and rhs = 0 only passes when lhs = 0 too.
struct InequalityReport {
    std::string name;
    std::string family;
    double p = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    std::optional<double> tracked_constant;
    double suite_constant = 64.0;
    double tolerance = 1e-12;
    bool degenerate = false;
    bool pass = false;

    double constant() const { return tracked_constant.value_or(suite_constant); }
    InequalityReport& finalize();
};

InequalityReport make_report(std::string name, std::string family, double p, double lhs, double rhs,
                             std::optional<double> tracked_constant, double suite_constant = 64.0);

/// Worst member of an ensemble sweep (largest lhs / (C·rhs)), with pass = all
/// members pass. The family label of the first member is replaced by `family`.
InequalityReport aggregate(std::span<const InequalityReport> members, std::string family);

bool all_pass(std::span<const InequalityReport> reports);

// CSV columns: name,family,p,lhs,rhs,ratio,tracked_constant,pass
void write_csv(std::ostream& out, std::span<const InequalityReport> reports);
std::string to_csv(std::span<const InequalityReport> reports);
nlohmann::json to_json(const InequalityReport& report);
nlohmann::json to_json(std::span<const InequalityReport> reports);

// Shortest round-trip representation of a double.
std::string format_number(double x);

} // namespace bdgkit
