#include "arat/injector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace arat {

namespace {

bool rel_close(double golden, double corrupted, double eps) {
    if (golden == 0.0) return corrupted == 0.0;
    return std::fabs(corrupted - golden) <= eps * std::fabs(golden);
}

} // namespace

bool AcceptanceSpec::accepts(const Outcome& corrupted, const Outcome& golden) const {
    if (corrupted.kind != Outcome::Kind::Completed) return false;
    switch (kind) {
    case Kind::ExactMatch:
        return corrupted.results == golden.results && corrupted.printed == golden.printed;
    case Kind::RelativeError: {
        if (names.empty()) {
            if (corrupted.results.size() != golden.results.size()) return false;
            for (std::size_t i = 0; i < golden.results.size(); ++i) {
                if (corrupted.results[i].first != golden.results[i].first) return false;
                if (!rel_close(golden.results[i].second.numeric(),
                               corrupted.results[i].second.numeric(), eps))
                    return false;
            }
            return true;
        }
        for (const auto& n : names) {
            const Value* g = golden.find_result(n);
            const Value* c = corrupted.find_result(n);
            if (!g || !c) return false;
            if (!rel_close(g->numeric(), c->numeric(), eps)) return false;
        }
        return true;
    }
    case Kind::ConvergenceThreshold: {
        const Value* c = corrupted.find_result(conv_name);
        if (!c) return false;
        double v = c->numeric();
        return v <= tau; // NaN fails
    }
    }
    return false;
}

std::string AcceptanceSpec::to_string() const {
    std::ostringstream os;
    switch (kind) {
    case Kind::ExactMatch:
        return "exact";
    case Kind::RelativeError:
        os << "rel:" << eps;
        if (!names.empty()) {
            os << ':';
            for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
        }
        return os.str();
    case Kind::ConvergenceThreshold:
        os << "conv:" << conv_name << ':' << tau;
        return os.str();
    }
    return "exact";
}

AcceptanceSpec AcceptanceSpec::parse(const std::string& text) {
    AcceptanceSpec s;
    if (text == "exact") return s;
    if (text.rfind("rel:", 0) == 0) {
        s.kind = Kind::RelativeError;
        std::string rest = text.substr(4);
        auto colon = rest.find(':');
        std::string epstr = colon == std::string::npos ? rest : rest.substr(0, colon);
        s.eps = std::stod(epstr);
        if (colon != std::string::npos) {
            std::string names = rest.substr(colon + 1);
            std::size_t pos = 0;
            while (pos <= names.size()) {
                auto comma = names.find(',', pos);
                std::string n = names.substr(pos, comma == std::string::npos ? std::string::npos
                                                                             : comma - pos);
                if (!n.empty()) s.names.push_back(n);
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
        }
        return s;
    }
    if (text.rfind("conv:", 0) == 0) {
        std::string rest = text.substr(5);
        auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("acceptance 'conv' needs name and threshold");
        s.kind = Kind::ConvergenceThreshold;
        s.conv_name = rest.substr(0, colon);
        s.tau = std::stod(rest.substr(colon + 1));
        return s;
    }
    throw std::invalid_argument("unknown acceptance spec '" + text + "'");
}

namespace {

struct PointInfo {
    std::size_t index = 0;  // position in the input vector
    std::uint32_t bit = 64; // single-bit mask position, 64 when not one
    bool golden_bit = false;
};

// deduction groups points on one float slot by (field, flip direction) and
// walks them from the highest bit down; a masked verdict lets every lower
// bit in the group inherit it without running
struct Group {
    std::vector<PointInfo> pts; // sorted by descending bit
    bool chained = false;
};

bool single_bit(std::uint64_t m, std::uint32_t& bit) {
    if (m == 0 || (m & (m - 1)) != 0) return false;
    bit = static_cast<std::uint32_t>(__builtin_ctzll(m));
    return true;
}

} // namespace

CampaignOutput run_campaign(const Program& p, const Bindings& inputs,
                            const std::vector<InjectionPoint>& points,
                            const CampaignOptions& opt) {
    CampaignOutput out;
    out.results.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out.results[i].point = points[i];
    if (points.empty()) return out;

    RunOptions gopt;
    gopt.step_limit = opt.step_limit;
    gopt.record_trace = true;
    RunResult golden = run(p, inputs, gopt);
    std::uint64_t limit = std::min<std::uint64_t>(opt.step_limit,
                                                  4 * golden.outcome.dynamic_length);

    // golden bit values per (dyn_id, slot), for flip-direction grouping
    auto slot_value = [&](const InjectionPoint& pt) -> std::optional<Value> {
        if (pt.dyn_id >= golden.trace.records.size()) return std::nullopt;
        const TraceRecord& r = golden.trace.records[pt.dyn_id];
        if (pt.slot == kResultSlot) {
            if (r.op != Opcode::Store || r.operands.empty()) return std::nullopt;
            return r.operands[0].value; // value about to land in the cell
        }
        if (pt.slot < 0 || static_cast<std::size_t>(pt.slot) >= r.operands.size())
            return std::nullopt;
        if (r.op == Opcode::Load && pt.slot == 0) return r.result; // memory element read
        return r.operands[pt.slot].value;
    };

    // group by (dyn, slot, field, direction); non-float or non-single-bit
    // points become singleton groups
    std::map<std::tuple<std::uint64_t, std::int32_t, int, int>, Group> groups;
    std::vector<Group> singles;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const InjectionPoint& pt = points[i];
        PointInfo info;
        info.index = i;
        std::uint32_t bit = 64;
        auto val = slot_value(pt);
        bool groupable = opt.deduce && val && val->type == ValueType::F64 &&
                         single_bit(pt.bits, bit) && bit != 63; // sign never infers
        if (!groupable) {
            Group g;
            g.pts.push_back(info);
            singles.push_back(std::move(g));
            continue;
        }
        info.bit = bit;
        info.golden_bit = (val->bits >> bit) & 1;
        int field = bit >= 52 ? 1 : 0; // exponent vs mantissa
        auto& g = groups[{pt.dyn_id, pt.slot, field, info.golden_bit ? 1 : 0}];
        g.chained = true;
        g.pts.push_back(info);
    }

    std::vector<Group> work;
    work.reserve(groups.size() + singles.size());
    for (auto& [k, g] : groups) {
        std::sort(g.pts.begin(), g.pts.end(),
                  [](const PointInfo& a, const PointInfo& b) { return a.bit > b.bit; });
        work.push_back(std::move(g));
    }
    for (auto& g : singles) work.push_back(std::move(g));

    struct Tally {
        std::uint64_t executed = 0, inferred = 0, contradictions = 0;
    };

    auto run_point = [&](const InjectionPoint& pt) {
        Outcome o = run_with_injection(p, inputs, {pt.dyn_id, pt.slot, pt.bits}, limit);
        return opt.accept.accepts(o, golden.outcome);
    };

    auto process_group = [&](const Group& g, Tally& t) {
        bool inherit = false;
        std::uint64_t inferred_seen = 0;
        for (const PointInfo& info : g.pts) {
            InjectionResult& r = out.results[info.index];
            if (!inherit) {
                r.masked = run_point(r.point);
                ++t.executed;
                if (g.chained && r.masked) inherit = true;
                continue;
            }
            r.masked = true;
            r.inferred = true;
            ++inferred_seen;
            ++t.inferred;
            if (opt.verify_deduction && inferred_seen % 10 == 0) {
                bool actual = run_point(r.point);
                ++t.executed;
                if (actual != r.masked) {
                    r.masked = actual;
                    r.inferred = false;
                    r.verified_contradiction = true;
                    ++t.contradictions;
                    --t.inferred;
                    inherit = false; // the chain's premise failed; resume running
                }
            }
        }
    };

    std::uint32_t jobs = std::max<std::uint32_t>(1, opt.jobs);
    if (jobs == 1 || work.size() <= 1) {
        Tally t;
        for (const Group& g : work) process_group(g, t);
        out.executed = t.executed;
        out.inferred = t.inferred;
        out.contradictions = t.contradictions;
        return out;
    }

    std::vector<Tally> tallies(jobs);
    std::vector<std::thread> threads;
    for (std::uint32_t j = 0; j < jobs; ++j) {
        threads.emplace_back([&, j] {
            for (std::size_t gi = j; gi < work.size(); gi += jobs)
                process_group(work[gi], tallies[j]);
        });
    }
    for (auto& th : threads) th.join();
    for (const Tally& t : tallies) {
        out.executed += t.executed;
        out.inferred += t.inferred;
        out.contradictions += t.contradictions;
    }
    return out;
}

void write_points(const std::vector<InjectionPoint>& pts, std::ostream& out) {
    std::vector<InjectionPoint> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& pt : sorted)
        out << pt.dyn_id << ' ' << pt.slot << ' ' << pt.bits << '\n';
}

std::vector<InjectionPoint> read_points(std::istream& in) {
    std::vector<InjectionPoint> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        InjectionPoint pt;
        if (!(ls >> pt.dyn_id >> pt.slot >> pt.bits))
            throw std::runtime_error("malformed injection point line: " + line);
        pts.push_back(pt);
    }
    return pts;
}

void write_results(const CampaignOutput& res, std::ostream& out) {
    for (const auto& r : res.results)
        out << r.point.dyn_id << ' ' << r.point.slot << ' ' << r.point.bits << ' '
            << (r.masked ? "masked" : "notmasked") << ' ' << (r.inferred ? 1 : 0) << '\n';
}

CampaignOutput read_results(std::istream& in) {
    CampaignOutput out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        InjectionResult r;
        std::string verdict;
        int inferred = 0;
        if (!(ls >> r.point.dyn_id >> r.point.slot >> r.point.bits >> verdict >> inferred))
            throw std::runtime_error("malformed injection result line: " + line);
        if (verdict != "masked" && verdict != "notmasked")
            throw std::runtime_error("malformed verdict in line: " + line);
        r.masked = verdict == "masked";
        r.inferred = inferred != 0;
        out.results.push_back(r);
        if (r.inferred) ++out.inferred;
        else ++out.executed;
    }
    return out;
}

} // namespace arat
