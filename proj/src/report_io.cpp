#include "arat/advf.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace arat {

namespace {

const char* kReportMagic = "ARAT-REPORT v1";

Rational parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) throw std::runtime_error("report: bad rational '" + s + "'");
    std::int64_t n = std::stoll(s.substr(0, slash));
    std::int64_t d = std::stoll(s.substr(slash + 1));
    return Rational(n, d);
}

void emit(std::ostringstream& os, const char* key, const std::string& sub, const Rational& r) {
    os << key << ' ' << sub << ' ' << r.to_string() << ' ' << r.to_decimal() << '\n';
}

} // namespace

std::string write_report(const ADVFReport& r) {
    std::ostringstream os;
    os << kReportMagic << '\n';
    os << "object " << r.object << '\n';
    if (!r.kernel.empty()) os << "kernel " << r.kernel << '\n';
    for (const auto& line : r.config_echo) os << "config " << line << '\n';
    os << "points " << r.points << '\n';
    os << "flips " << r.flips << '\n';
    os << "executed " << r.injections_executed << '\n';
    os << "inferred " << r.injections_inferred << '\n';
    os << "contradictions " << r.deduction_contradictions << '\n';
    os << "advf " << r.advf.to_string() << ' ' << r.advf.to_decimal() << '\n';
    for (const auto& [name, v] : r.by_level) emit(os, "level", name, v);
    for (const auto& [name, v] : r.by_class) emit(os, "class", name, v);
    for (const auto& [name, v] : r.by_opcode) emit(os, "opcode", name, v);
    return os.str();
}

ADVFReport read_report(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kReportMagic)
        throw std::runtime_error("report: bad header");
    ADVFReport r;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "object") {
            ls >> r.object;
        } else if (key == "kernel") {
            ls >> r.kernel;
        } else if (key == "config") {
            std::string rest;
            std::getline(ls, rest);
            if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
            r.config_echo.push_back(rest);
        } else if (key == "points") {
            ls >> r.points;
        } else if (key == "flips") {
            ls >> r.flips;
        } else if (key == "executed") {
            ls >> r.injections_executed;
        } else if (key == "inferred") {
            ls >> r.injections_inferred;
        } else if (key == "contradictions") {
            ls >> r.deduction_contradictions;
        } else if (key == "advf") {
            std::string frac;
            ls >> frac;
            r.advf = parse_rational(frac);
        } else if (key == "level" || key == "class" || key == "opcode") {
            std::string name, frac;
            ls >> name >> frac;
            auto& dst = key == "level" ? r.by_level : key == "class" ? r.by_class : r.by_opcode;
            dst.emplace_back(name, parse_rational(frac));
        } else {
            throw std::runtime_error("report: unknown key '" + key + "'");
        }
    }
    return r;
}

namespace {

const Rational* find_part(const std::vector<std::pair<std::string, Rational>>& parts,
                          const char* name) {
    for (const auto& [n, v] : parts)
        if (n == name) return &v;
    return nullptr;
}

std::string cell(const Rational* r) { return r ? r->to_decimal() : "0"; }

std::vector<const ADVFReport*> sorted_by_name(const std::vector<ADVFReport>& reports) {
    std::vector<const ADVFReport*> order;
    for (const auto& r : reports) order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const ADVFReport* a, const ADVFReport* b) {
        if (a->kernel != b->kernel) return a->kernel < b->kernel;
        return a->object < b->object;
    });
    return order;
}

const char* kLevels[] = {"operation", "propagation", "algorithm"};
const char* kClasses[] = {"overwriting", "logical_comparison", "value_shadowing",
                          "algorithm_semantic"};

// two rows for the same object under the same config would shadow each other
void reject_duplicates(const std::vector<ADVFReport>& reports) {
    for (std::size_t i = 0; i < reports.size(); ++i)
        for (std::size_t j = i + 1; j < reports.size(); ++j)
            if (reports[i].kernel == reports[j].kernel &&
                reports[i].object == reports[j].object &&
                reports[i].config_echo == reports[j].config_echo)
                throw std::invalid_argument("duplicate report for object '" + reports[i].object +
                                            "' under the same config");
}

} // namespace

std::string merge_reports_text(const std::vector<ADVFReport>& reports) {
    reject_duplicates(reports);
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-12s %-10s %10s %10s %10s %10s %10s %10s %10s %10s\n",
                  "kernel", "object", "advf", "op", "prop", "algo", "ovw", "logic", "shadow",
                  "semantic");
    os << buf;
    for (const ADVFReport* r : sorted_by_name(reports)) {
        std::snprintf(buf, sizeof buf, "%-12s %-10s %10s %10s %10s %10s %10s %10s %10s %10s\n",
                      r->kernel.empty() ? "-" : r->kernel.c_str(), r->object.c_str(),
                      r->advf.to_decimal().c_str(), cell(find_part(r->by_level, kLevels[0])).c_str(),
                      cell(find_part(r->by_level, kLevels[1])).c_str(),
                      cell(find_part(r->by_level, kLevels[2])).c_str(),
                      cell(find_part(r->by_class, kClasses[0])).c_str(),
                      cell(find_part(r->by_class, kClasses[1])).c_str(),
                      cell(find_part(r->by_class, kClasses[2])).c_str(),
                      cell(find_part(r->by_class, kClasses[3])).c_str());
        os << buf;
    }
    return os.str();
}

std::string merge_reports_csv(const std::vector<ADVFReport>& reports) {
    reject_duplicates(reports);
    std::ostringstream os;
    os << "kernel,object,advf,points,flips";
    for (const char* l : kLevels) os << ",level_" << l;
    for (const char* c : kClasses) os << ",class_" << c;
    os << '\n';
    for (const ADVFReport* r : sorted_by_name(reports)) {
        os << r->kernel << ',' << r->object << ',' << r->advf.to_decimal() << ',' << r->points
           << ',' << r->flips;
        for (const char* l : kLevels) os << ',' << cell(find_part(r->by_level, l));
        for (const char* c : kClasses) os << ',' << cell(find_part(r->by_class, c));
        os << '\n';
    }
    return os.str();
}

} // namespace arat
