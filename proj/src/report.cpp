#include "bdgkit/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

namespace bdgkit {

InequalityReport& InequalityReport::finalize() {
    const double c = constant();
    if (rhs == 0.0) {
        degenerate = true;
        ratio = lhs == 0.0 ? 0.0 : INFINITY;
        pass = lhs == 0.0;
        return *this;
    }
    degenerate = false;
    ratio = lhs / rhs;
    pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= c * rhs * (1.0 + tolerance);
    return *this;
}

InequalityReport make_report(std::string name, std::string family, double p, double lhs, double rhs,
                             std::optional<double> tracked_constant, double suite_constant) {
    InequalityReport r;
    r.name = std::move(name);
    r.family = std::move(family);
    r.p = p;
    r.lhs = lhs;
    r.rhs = rhs;
    r.tracked_constant = tracked_constant;
    r.suite_constant = suite_constant;
    r.finalize();
    return r;
}

namespace {

double severity(const InequalityReport& r) {
    if (r.degenerate) {
        return r.pass ? 0.0 : INFINITY;
    }
    return r.ratio / r.constant();
}

} // namespace

InequalityReport aggregate(std::span<const InequalityReport> members, std::string family) {
    InequalityReport worst;
    if (members.empty()) {
        worst.family = std::move(family);
        worst.degenerate = true;
        worst.pass = true;
        return worst;
    }
    std::size_t worst_index = 0;
    bool everyone_passes = true;
    for (std::size_t i = 0; i < members.size(); ++i) {
        everyone_passes = everyone_passes && members[i].pass;
        if (severity(members[i]) > severity(members[worst_index])) {
            worst_index = i;
        }
    }
    worst = members[worst_index];
    worst.family = std::move(family);
    worst.pass = everyone_passes;
    return worst;
}

bool all_pass(std::span<const InequalityReport> reports) {
    for (const auto& r : reports) {
        if (!r.pass) {
            return false;
        }
    }
    return true;
}

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

void write_csv(std::ostream& out, std::span<const InequalityReport> reports) {
    out << "name,family,p,lhs,rhs,ratio,tracked_constant,pass\n";
    for (const auto& r : reports) {
        out << csv_field(r.name) << ',' << csv_field(r.family) << ',' << format_number(r.p) << ','
            << format_number(r.lhs) << ',' << format_number(r.rhs) << ',' << format_number(r.ratio) << ','
            << (r.tracked_constant ? format_number(*r.tracked_constant) : std::string()) << ','
            << (r.pass ? "true" : "false") << '\n';
    }
}

std::string to_csv(std::span<const InequalityReport> reports) {
    std::ostringstream out;
    write_csv(out, reports);
    return out.str();
}

nlohmann::json to_json(const InequalityReport& r) {
    auto number = [](double x) -> nlohmann::json {
        if (!std::isfinite(x)) {
            return format_number(x);
        }
        return x;
    };
    return nlohmann::json{{"name", r.name},
                          {"family", r.family},
                          {"p", r.p},
                          {"lhs", number(r.lhs)},
                          {"rhs", number(r.rhs)},
                          {"ratio", number(r.ratio)},
                          {"tracked_constant", r.tracked_constant ? nlohmann::json(*r.tracked_constant)
                                                                  : nlohmann::json(nullptr)},
                          {"pass", r.pass}};
}

nlohmann::json to_json(std::span<const InequalityReport> reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports) {
        arr.push_back(to_json(r));
    }
    return arr;
}

} // namespace bdgkit
