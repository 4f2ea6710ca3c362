#include "arat/advf.hpp"

#include "arat/config.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace arat {

std::vector<SlotPoint> enumerate_candidates(const Trace& t, std::int32_t object) {
    std::vector<SlotPoint> out;
    for (std::uint32_t ri = 0; ri < t.records.size(); ++ri) {
        const TraceRecord& r = t.records[ri];
        if (!opcode_counted(r.op)) continue;
        if (r.op == Opcode::Load) {
            // the memory element read; the address register never counts here
            if (!r.operands.empty() && r.operands[0].ref.object == object)
                out.push_back({r.dyn_id, 0, ri});
            continue;
        }
        if (r.op == Opcode::Store) {
            if (r.result_ref.object == object) out.push_back({r.dyn_id, kResultSlot, ri});
            if (!r.operands.empty() && r.operands[0].ref.object == object)
                out.push_back({r.dyn_id, 0, ri});
            continue;
        }
        for (std::size_t s = 0; s < r.operands.size(); ++s)
            if (!r.operands[s].has_address && r.operands[s].ref.object == object)
                out.push_back({r.dyn_id, static_cast<std::int32_t>(s), ri});
    }
    return out;
}

namespace {

struct FlipState {
    std::size_t cand = 0;    // index into candidates
    std::uint64_t mask = 0;
    MaskLevel level = MaskLevel::Operation;
    MaskClass cls = MaskClass::Overwriting;
    bool masked = false;
    bool decided = false;
};

} // namespace

AdvfOutput compute_advf(const Program& p, const Bindings& inputs, const Trace& trace,
                        const std::string& object, const AnalysisConfig& cfg,
                        const CampaignOutput* injection_results) {
    std::int32_t obj = trace.objects.find(object);
    if (obj < 0) throw std::invalid_argument("unknown data object '" + object + "'");
    if (cfg.k < 1 || cfg.k > 50) throw std::invalid_argument("k must be in 1..50");

    std::vector<SlotPoint> cands = enumerate_candidates(trace, obj);

    std::optional<ShadowingThreshold> thr;
    if (auto it = cfg.shadows.find(object); it != cfg.shadows.end()) thr = it->second;

    // operation-level pass; undecided flips go to propagation
    std::vector<FlipState> flips;
    std::vector<std::uint64_t> flips_per_cand(cands.size(), 0);
    for (std::size_t ci = 0; ci < cands.size(); ++ci) {
        const TraceRecord& rec = trace.records[cands[ci].rec_index];
        MaskingVerdict v = classify(p, rec, cands[ci].slot, cfg.pattern, thr);
        flips_per_cand[ci] = v.masks.size();
        for (std::size_t mi = 0; mi < v.masks.size(); ++mi) {
            FlipState fs;
            fs.cand = ci;
            fs.mask = v.masks[mi];
            if (v.bits[mi].masked) {
                fs.masked = true;
                fs.decided = true;
                fs.level = MaskLevel::Operation;
                fs.cls = v.bits[mi].cls;
            }
            flips.push_back(fs);
        }
    }

    // propagation pass over everything still undecided
    std::vector<std::size_t> open;
    std::vector<Candidate> work;
    for (std::size_t fi = 0; fi < flips.size(); ++fi) {
        if (flips[fi].decided) continue;
        const SlotPoint& sp = cands[flips[fi].cand];
        open.push_back(fi);
        work.push_back({sp.dyn_id, sp.slot, flips[fi].mask});
    }
    PropagationConfig pcfg;
    pcfg.k = cfg.k;
    pcfg.state_tolerance = cfg.state_tolerance;
    pcfg.step_limit = cfg.step_limit;
    std::vector<PropagationOutcome> prop = resolve(p, inputs, work, pcfg);

    std::vector<InjectionPoint> pending;
    for (std::size_t wi = 0; wi < work.size(); ++wi) {
        FlipState& fs = flips[open[wi]];
        if (prop[wi].masked) {
            fs.masked = true;
            fs.decided = true;
            fs.level = MaskLevel::Propagation;
            fs.cls = prop[wi].cls;
        } else {
            pending.push_back(prop[wi].escalated);
        }
    }
    std::sort(pending.begin(), pending.end());

    AdvfOutput out;
    if (!pending.empty() && !injection_results) {
        out.pending = true;
        out.points = std::move(pending);
        return out;
    }

    std::map<std::tuple<std::uint64_t, std::int32_t, std::uint64_t>, bool> verdicts;
    std::uint64_t executed = 0, inferred = 0, contradictions = 0;
    if (injection_results) {
        for (const auto& r : injection_results->results)
            verdicts[{r.point.dyn_id, r.point.slot, r.point.bits}] = r.masked;
        executed = injection_results->executed;
        inferred = injection_results->inferred;
        contradictions = injection_results->contradictions;
    }
    // partial coverage keeps the campaign resumable: hand back what is left
    std::vector<InjectionPoint> uncovered;
    for (const InjectionPoint& pt : pending)
        if (!verdicts.count({pt.dyn_id, pt.slot, pt.bits})) uncovered.push_back(pt);
    if (!uncovered.empty()) {
        out.pending = true;
        out.points = std::move(uncovered);
        return out;
    }
    for (std::size_t fi = 0; fi < flips.size(); ++fi) {
        FlipState& fs = flips[fi];
        if (fs.decided) continue;
        const SlotPoint& sp = cands[fs.cand];
        bool masked = verdicts.at({sp.dyn_id, sp.slot, fs.mask});
        fs.decided = true;
        fs.masked = masked;
        fs.level = MaskLevel::Algorithm;
        fs.cls = MaskClass::AlgorithmSemantic;
    }

    // exact aggregation: each masked flip adds 1/(n * m) with n the flip
    // count of its own slot and m the candidate count
    ADVFReport rep;
    rep.object = object;
    rep.points = cands.size();
    for (std::uint64_t n : flips_per_cand) rep.flips += n;
    rep.injections_executed = executed;
    rep.injections_inferred = inferred;
    rep.deduction_contradictions = contradictions;
    rep.config_echo = config_echo(cfg, object);

    Rational advf(0);
    std::map<std::string, Rational> by_level, by_class, by_opcode;
    for (MaskLevel l : {MaskLevel::Operation, MaskLevel::Propagation, MaskLevel::Algorithm})
        by_level[level_name(l)] = Rational(0);
    for (MaskClass c : {MaskClass::Overwriting, MaskClass::LogicalComparison,
                        MaskClass::ValueShadowing, MaskClass::AlgorithmSemantic})
        by_class[class_name(c)] = Rational(0);

    std::int64_t m = static_cast<std::int64_t>(cands.size());
    for (const FlipState& fs : flips) {
        if (!fs.masked) continue;
        std::int64_t n = static_cast<std::int64_t>(flips_per_cand[fs.cand]);
        Rational w(1, n * m);
        advf += w;
        by_level[level_name(fs.level)] += w;
        by_class[class_name(fs.cls)] += w;
        const TraceRecord& rec = trace.records[cands[fs.cand].rec_index];
        auto [it, fresh] = by_opcode.try_emplace(opcode_name(rec.op), Rational(0));
        (void)fresh;
        it->second += w;
    }
    rep.advf = advf;
    rep.by_level.assign({{level_name(MaskLevel::Operation), by_level[level_name(MaskLevel::Operation)]},
                         {level_name(MaskLevel::Propagation), by_level[level_name(MaskLevel::Propagation)]},
                         {level_name(MaskLevel::Algorithm), by_level[level_name(MaskLevel::Algorithm)]}});
    rep.by_class.assign(
        {{class_name(MaskClass::Overwriting), by_class[class_name(MaskClass::Overwriting)]},
         {class_name(MaskClass::LogicalComparison), by_class[class_name(MaskClass::LogicalComparison)]},
         {class_name(MaskClass::ValueShadowing), by_class[class_name(MaskClass::ValueShadowing)]},
         {class_name(MaskClass::AlgorithmSemantic), by_class[class_name(MaskClass::AlgorithmSemantic)]}});
    for (const auto& [name, r] : by_opcode) rep.by_opcode.emplace_back(name, r);

    out.pending = false;
    out.report = std::move(rep);
    return out;
}

ADVFReport analyze_object(const Program& p, const Bindings& inputs, const std::string& object,
                          const AnalysisConfig& cfg, ResultCache* cache) {
    RunOptions opt;
    opt.step_limit = cfg.step_limit;
    opt.record_trace = true;
    RunResult golden = run(p, inputs, opt);
    if (golden.outcome.kind != Outcome::Kind::Completed)
        throw std::runtime_error("golden run did not complete");
    resolve_object_refs(golden.trace, p);

    AdvfOutput first = compute_advf(p, inputs, golden.trace, object, cfg, nullptr);
    if (!first.pending) return first.report;

    CampaignOutput results;
    std::vector<InjectionPoint> missing;
    for (const InjectionPoint& pt : first.points) {
        if (cache) {
            auto it = cache->find({pt.dyn_id, pt.slot, pt.bits});
            if (it != cache->end()) {
                InjectionResult r;
                r.point = pt;
                r.masked = it->second;
                results.results.push_back(r);
                continue;
            }
        }
        missing.push_back(pt);
    }
    if (!missing.empty()) {
        CampaignOptions copt;
        copt.accept = cfg.accept;
        copt.jobs = cfg.jobs;
        copt.deduce = cfg.deduce;
        copt.verify_deduction = cfg.verify_deduction;
        copt.step_limit = cfg.step_limit;
        CampaignOutput fresh = run_campaign(p, inputs, missing, copt);
        for (const auto& r : fresh.results) {
            results.results.push_back(r);
            if (cache) (*cache)[{r.point.dyn_id, r.point.slot, r.point.bits}] = r.masked;
        }
        results.executed += fresh.executed;
        results.inferred += fresh.inferred;
        results.contradictions += fresh.contradictions;
    }

    AdvfOutput second = compute_advf(p, inputs, golden.trace, object, cfg, &results);
    if (second.pending) throw std::runtime_error("analysis still pending after injection");
    return second.report;
}

} // namespace arat
