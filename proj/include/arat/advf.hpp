#pragma once

#include "arat/injector.hpp"
#include "arat/rational.hpp"

#include <map>
#include <optional>

namespace arat {

struct AnalysisConfig {
    std::uint32_t k = 10; // 1..50
    FaultPattern pattern;
    std::map<std::string, ShadowingThreshold> shadows; // per object
    AcceptanceSpec accept;
    bool deduce = true;
    bool verify_deduction = false;
    std::uint32_t jobs = 1;
    std::uint64_t step_limit = 10'000'000;
    std::uint64_t seed = 1;
    std::optional<std::pair<std::string, double>> state_tolerance;
};

// one candidate (dynamic op, operand slot referencing the target object)
struct SlotPoint {
    std::uint64_t dyn_id = 0;
    std::int32_t slot = 0;
    std::uint32_t rec_index = 0;
};

// the aDVF candidate universe for one object; trace must be resolved
std::vector<SlotPoint> enumerate_candidates(const Trace& t, std::int32_t object);

struct ADVFReport {
    std::string object;
    std::string kernel;
    std::vector<std::string> config_echo; // canonical config lines
    std::uint64_t points = 0;             // Eq. 1 denominator m
    std::uint64_t flips = 0;              // enumerated pattern positions
    Rational advf;
    std::vector<std::pair<std::string, Rational>> by_level;  // sums to advf
    std::vector<std::pair<std::string, Rational>> by_class;  // sums to advf
    std::vector<std::pair<std::string, Rational>> by_opcode; // sums to advf
    std::uint64_t injections_executed = 0;
    std::uint64_t injections_inferred = 0;
    std::uint64_t deduction_contradictions = 0;
};

struct AdvfOutput {
    bool pending = false;
    std::vector<InjectionPoint> points; // escalated, sorted, when pending
    ADVFReport report;                  // when !pending
};

// two-phase protocol: without results, escalated points are returned as
// pending; with results covering them, the final report is produced.
AdvfOutput compute_advf(const Program& p, const Bindings& inputs, const Trace& trace,
                        const std::string& object, const AnalysisConfig& cfg,
                        const CampaignOutput* injection_results = nullptr);

// convenience one-shot: trace, analyze, self-inject, finalize.
// cache maps (dyn_id, slot, bits) -> masked verdict and is consulted before
// executing an injection; misses are run and inserted.
using ResultCache = std::map<std::tuple<std::uint64_t, std::int32_t, std::uint64_t>, bool>;
ADVFReport analyze_object(const Program& p, const Bindings& inputs, const std::string& object,
                          const AnalysisConfig& cfg, ResultCache* cache = nullptr);

std::string write_report(const ADVFReport& r);
ADVFReport read_report(std::istream& in);
std::string merge_reports_text(const std::vector<ADVFReport>& reports);
std::string merge_reports_csv(const std::vector<ADVFReport>& reports);

} // namespace arat
