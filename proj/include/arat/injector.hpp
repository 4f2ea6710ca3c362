#pragma once

#include "arat/propagation.hpp"

#include <iosfwd>

namespace arat {

struct AcceptanceSpec {
    enum class Kind { ExactMatch, RelativeError, ConvergenceThreshold };
    Kind kind = Kind::ExactMatch;
    double eps = 0.0;                    // RelativeError
    std::vector<std::string> names;      // RelativeError; empty = every ret value
    std::string conv_name;               // ConvergenceThreshold scalar name
    double tau = 0.0;

    // crash/timeout never acceptable
    bool accepts(const Outcome& corrupted, const Outcome& golden) const;
    std::string to_string() const;
    static AcceptanceSpec parse(const std::string& text); // exact | rel:<e>[:a,b] | conv:<name>:<tau>
};

struct InjectionResult {
    InjectionPoint point;
    bool masked = false; // MaskedAlgorithm iff Completed and accepted
    bool inferred = false;
    bool verified_contradiction = false; // --verify-deduction found a mismatch
};

struct CampaignOptions {
    AcceptanceSpec accept;
    std::uint32_t jobs = 1;
    bool deduce = true;           // higher-order-bit deduction on float slots
    bool verify_deduction = false; // re-execute every 10th inferred point
    std::uint64_t step_limit = 10'000'000;
};

struct CampaignOutput {
    std::vector<InjectionResult> results; // input order
    std::uint64_t executed = 0;
    std::uint64_t inferred = 0;
    std::uint64_t contradictions = 0;
};

CampaignOutput run_campaign(const Program& p, const Bindings& inputs,
                            const std::vector<InjectionPoint>& points,
                            const CampaignOptions& opt);

void write_points(const std::vector<InjectionPoint>& pts, std::ostream& out);
std::vector<InjectionPoint> read_points(std::istream& in);
void write_results(const CampaignOutput& res, std::ostream& out);
CampaignOutput read_results(std::istream& in);

} // namespace arat
