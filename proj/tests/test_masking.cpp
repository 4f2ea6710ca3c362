#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "arat/masking.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace arat;
using testutil::eval_line;
using testutil::find_rec;
using testutil::lit;
using testutil::parse_checked;
using testutil::run_traced;

namespace {

FaultPattern single() { return FaultPattern{}; }

std::uint64_t masked_count(const MaskingVerdict& v) {
    std::uint64_t n = 0;
    for (const auto& b : v.bits)
        if (b.masked) ++n;
    return n;
}

} // namespace

TEST_CASE("fault pattern enumeration counts") {
    CHECK(single().enumerate(64).size() == 64);
    CHECK(single().enumerate(32).size() == 32);
    CHECK(single().enumerate(1).size() == 1);
    FaultPattern at;
    at.kind = FaultPattern::Kind::SingleBitAt;
    at.bit = 7;
    CHECK(at.enumerate(64) == std::vector<std::uint64_t>{1ull << 7});
    FaultPattern multi;
    multi.kind = FaultPattern::Kind::ContiguousMultiBit;
    multi.width = 2;
    auto masks = multi.enumerate(64);
    CHECK(masks.size() == 63); // bit_width - w + 1
    CHECK(masks[0] == 0x3ull);
    CHECK(masks.back() == 0xc000000000000000ull);
    FaultPattern m4;
    m4.kind = FaultPattern::Kind::ContiguousMultiBit;
    m4.width = 4;
    CHECK(m4.enumerate(32).size() == 29);
}

TEST_CASE("pattern text form round-trips") {
    CHECK(FaultPattern::parse("single").kind == FaultPattern::Kind::SingleBit);
    CHECK(FaultPattern::parse("multi:3").width == 3);
    CHECK(FaultPattern::parse("bit:9").bit == 9);
    CHECK(FaultPattern::parse(single().to_string()).kind == FaultPattern::Kind::SingleBit);
    CHECK_THROWS(FaultPattern::parse("multi:0"));
    CHECK_THROWS(FaultPattern::parse("waffles"));
}

TEST_CASE("store destination is fully masked overwriting") {
    Program p = parse_checked(R"ir(
alloc a f64 1

entry:
  store f64 2.5, @a
  %x = load f64 @a
  ret %x
)ir");
    Trace t = run_traced(p).trace;
    const TraceRecord* st = find_rec(t, Opcode::Store);
    REQUIRE(st);
    MaskingVerdict v = classify(p, *st, kResultSlot, single(), std::nullopt);
    CHECK(v.bits.size() == 64);
    CHECK(masked_count(v) == 64);
    CHECK(v.masked_fraction() == Rational(1));
    for (const auto& b : v.bits) CHECK(b.cls == MaskClass::Overwriting);
}

TEST_CASE("and with a constant mask hides exactly the zeroed bits") {
    Program p = parse_checked(R"ir(
alloc a i32 1

entry:
  store i32 -1, @a
  %x = load i32 @a
  %m = and i32 %x, 65535
  ret %m
)ir");
    Trace t = run_traced(p).trace;
    const TraceRecord* an = find_rec(t, Opcode::And);
    REQUIRE(an);
    MaskingVerdict v = classify(p, *an, 0, single(), std::nullopt);
    CHECK(v.bits.size() == 32);
    CHECK(masked_count(v) == 16);
    CHECK(v.masked_fraction() == Rational(1, 2));
    for (size_t i = 0; i < v.masks.size(); ++i) {
        bool high = (v.masks[i] & 0xffff0000ull) != 0;
        CHECK(v.bits[i].masked == high);
        if (v.bits[i].masked) CHECK(v.bits[i].cls == MaskClass::LogicalComparison);
    }
}

TEST_CASE("fcmp masking equals the brute-force recompute count") {
    Program p = parse_checked(R"ir(
alloc a f64 1

entry:
  store f64 1.0, @a
  %x = load f64 @a
  %c = fcmp olt f64 %x, 1000.0
  ret %c
)ir");
    Trace t = run_traced(p).trace;
    const TraceRecord* fc = find_rec(t, Opcode::FCmp);
    REQUIRE(fc);
    MaskingVerdict v = classify(p, *fc, 0, single(), std::nullopt);
    REQUIRE(v.bits.size() == 64);

    std::uint64_t oracle = 0;
    for (int b = 0; b < 64; ++b) {
        Value flipped = Value::from_bits(ValueType::F64, Value::f64(1.0).bits ^ (1ull << b));
        Outcome o = eval_line("%r = fcmp olt f64 " + lit(flipped) + ", 1000.0");
        bool same = o.results[0].second == Value::i1(true);
        CHECK(v.bits[static_cast<size_t>(b)].masked == same);
        if (same) ++oracle;
    }
    CHECK(masked_count(v) == oracle);
    for (const auto& b : v.bits)
        if (b.masked) CHECK(b.cls == MaskClass::LogicalComparison);
}

TEST_CASE("trunc and shifts mask flips the recompute cannot see") {
    Program p = parse_checked(R"ir(
alloc a i64 1

entry:
  store i64 81985529216486895, @a
  %x = load i64 @a
  %t = trunc i64 %x to i32
  %s = shl i64 %x, 32
  %u = lshr i64 %x, 8
  ret %t, %s, %u
)ir");
    Trace t = run_traced(p).trace;

    // trunc: flips in the dropped high half are masked
    const TraceRecord* tr = find_rec(t, Opcode::Trunc);
    REQUIRE(tr);
    MaskingVerdict vt = classify(p, *tr, 0, single(), std::nullopt);
    CHECK(masked_count(vt) == 32);
    for (size_t i = 0; i < vt.masks.size(); ++i)
        CHECK(vt.bits[i].masked == (vt.masks[i] > 0xffffffffull));

    // shl 32: the high half of the input is shifted out
    const TraceRecord* sh = find_rec(t, Opcode::Shl);
    REQUIRE(sh);
    MaskingVerdict vs = classify(p, *sh, 0, single(), std::nullopt);
    CHECK(masked_count(vs) == 32);
    for (const auto& b : vs.bits)
        if (b.masked) CHECK(b.cls == MaskClass::Overwriting);

    // lshr 8: the low 8 bits fall off
    const TraceRecord* lr = find_rec(t, Opcode::LShr);
    REQUIRE(lr);
    MaskingVerdict vl = classify(p, *lr, 0, single(), std::nullopt);
    CHECK(masked_count(vl) == 8);

    // the shift amount slot defers
    MaskingVerdict va = classify(p, *sh, 1, single(), std::nullopt);
    CHECK(masked_count(va) == 0);
}

TEST_CASE("xor and or follow recompute equality") {
    Program p = parse_checked(R"ir(
alloc a i64 1

entry:
  store i64 -1, @a
  %x = load i64 @a
  %o = or i64 %x, -1
  %e = xor i64 %x, 0
  ret %o, %e
)ir");
    Trace t = run_traced(p).trace;
    // or with all-ones masks every flip
    const TraceRecord* orr = find_rec(t, Opcode::Or);
    REQUIRE(orr);
    CHECK(masked_count(classify(p, *orr, 0, single(), std::nullopt)) == 64);
    // xor with zero reproduces the input: nothing masked
    const TraceRecord* xo = find_rec(t, Opcode::Xor);
    REQUIRE(xo);
    CHECK(masked_count(classify(p, *xo, 0, single(), std::nullopt)) == 0);
}

TEST_CASE("float arithmetic defers without a shadowing threshold") {
    Program p = parse_checked(R"ir(
alloc a f64 1

entry:
  store f64 0.0012, @a
  %x = load f64 @a
  %r = fadd f64 %x, 1000.0
  ret %r
)ir");
    Trace t = run_traced(p).trace;
    const TraceRecord* fa = find_rec(t, Opcode::FAdd);
    REQUIRE(fa);
    MaskingVerdict v = classify(p, *fa, 0, single(), std::nullopt);
    CHECK(masked_count(v) == 0);
}

TEST_CASE("relative shadowing threshold absorbs small addends") {
    Program p = parse_checked(R"ir(
alloc a f64 1

entry:
  store f64 0.0012, @a
  %x = load f64 @a
  %r = fadd f64 %x, 1000.0
  ret %r
)ir");
    Trace t = run_traced(p).trace;
    const TraceRecord* fa = find_rec(t, Opcode::FAdd);
    REQUIRE(fa);
    ShadowingThreshold thr;
    thr.kind = ShadowingThreshold::Kind::RelativeResultError;
    thr.eps = 1e-3;
    MaskingVerdict v = classify(p, *fa, 0, single(), thr);

    double golden = 0.0012 + 1000.0;
    std::uint64_t oracle = 0;
    for (int b = 0; b < 64; ++b) {
        double vp = Value::from_bits(ValueType::F64, Value::f64(0.0012).bits ^ (1ull << b)).as_f64();
        double rp = vp + 1000.0;
        bool ok = std::abs(rp - golden) <= thr.eps * std::abs(golden);
        CHECK(v.bits[static_cast<size_t>(b)].masked == ok);
        if (ok) ++oracle;
        // every mantissa flip staying at magnitude <= 1.0 is absorbed
        if (b < 52 && std::abs(vp) <= 1.0) CHECK(v.bits[static_cast<size_t>(b)].masked);
    }
    CHECK(masked_count(v) == oracle);
    CHECK(oracle > 0);
    for (const auto& b : v.bits)
        if (b.masked) CHECK(b.cls == MaskClass::ValueShadowing);
    CHECK(v.masked_fraction() == Rational(static_cast<std::int64_t>(oracle), 64));

    // an enormous epsilon accepts every flip
    ShadowingThreshold inf;
    inf.kind = ShadowingThreshold::Kind::RelativeResultError;
    inf.eps = 1e308;
    MaskingVerdict vi = classify(p, *fa, 0, single(), inf);
    CHECK(masked_count(vi) == 64);
}

TEST_CASE("absolute range shadowing verified by enumeration") {
    Program p = parse_checked(R"ir(
alloc a f64 1

entry:
  store f64 3.0, @a
  %x = load f64 @a
  %r = fmul f64 %x, 2.0
  ret %r
)ir");
    Trace t = run_traced(p).trace;
    const TraceRecord* fm = find_rec(t, Opcode::FMul);
    REQUIRE(fm);
    ShadowingThreshold thr;
    thr.kind = ShadowingThreshold::Kind::AbsoluteRange;
    thr.lo = 5.9;
    thr.hi = 6.1;
    MaskingVerdict v = classify(p, *fm, 0, single(), thr);
    std::uint64_t oracle = 0;
    for (int b = 0; b < 64; ++b) {
        double vp = Value::from_bits(ValueType::F64, Value::f64(3.0).bits ^ (1ull << b)).as_f64();
        double rp = vp * 2.0;
        bool ok = rp >= thr.lo && rp <= thr.hi;
        CHECK(v.bits[static_cast<size_t>(b)].masked == ok);
        if (ok) ++oracle;
    }
    CHECK(masked_count(v) == oracle);
    CHECK(shadowing_fraction(p, *fm, 0, single(), thr) ==
          Rational(static_cast<std::int64_t>(oracle), 64));
}

TEST_CASE("deferring opcodes never mask at operation level") {
    Program p = parse_checked(R"ir(
alloc a f64 1
alloc k i64 1

entry:
  store f64 2.0, @a
  store i64 3, @k
  %x = load f64 @a
  %i = load i64 @k
  %z = zext i32 7 to i64
  %s = call f64 sqrt(%x)
  call void print(%x)
  %c = icmp slt i64 %i, 9
  condbr %c, good, good
good:
  store f64 %x, @a
  ret %x
)ir");
    Trace t = run_traced(p).trace;
    for (Opcode op : {Opcode::Load, Opcode::ZExt, Opcode::Call, Opcode::Ret, Opcode::CondBr}) {
        const TraceRecord* r = find_rec(t, op);
        REQUIRE(r);
        if (r->operands.empty()) continue;
        MaskingVerdict v = classify(p, *r, 0, single(), std::nullopt);
        CHECK(masked_count(v) == 0);
    }
    // a store's value slot also defers
    const TraceRecord* st = find_rec(t, Opcode::Store, 2);
    REQUIRE(st);
    CHECK(masked_count(classify(p, *st, 0, single(), std::nullopt)) == 0);
}

TEST_CASE("opcode_counted excludes address and control plumbing") {
    CHECK_FALSE(opcode_counted(Opcode::Gep));
    CHECK_FALSE(opcode_counted(Opcode::Phi));
    CHECK_FALSE(opcode_counted(Opcode::Alloc));
    CHECK(opcode_counted(Opcode::Load));
    CHECK(opcode_counted(Opcode::Store));
    CHECK(opcode_counted(Opcode::FAdd));
    CHECK(opcode_counted(Opcode::ICmp));
    CHECK(opcode_counted(Opcode::Ret));
    CHECK(opcode_counted(Opcode::Call));
}

TEST_CASE("randomized integer rules agree with the interpreter") {
    testutil::Rng rng(0x51ec7);
    for (int iter = 0; iter < 200; ++iter) {
        std::uint64_t a = rng.next();
        std::uint64_t b = rng.next();
        const char* ops[] = {"and", "or", "xor"};
        const char* op = ops[iter % 3];
        std::string text = "alloc m i64 1\n\nentry:\n  store i64 " +
                           Value::i64(static_cast<std::int64_t>(a)).to_text() +
                           ", @m\n  %x = load i64 @m\n  %r = " + op + " i64 %x, " +
                           Value::i64(static_cast<std::int64_t>(b)).to_text() + "\n  ret %r\n";
        Program p = parse_checked(text);
        RunResult rr = testutil::run_traced(p);
        const TraceRecord* rec = find_rec(rr.trace, Opcode::And);
        if (!rec) rec = find_rec(rr.trace, Opcode::Or);
        if (!rec) rec = find_rec(rr.trace, Opcode::Xor);
        REQUIRE(rec);
        MaskingVerdict v = classify(p, *rec, 0, single(), std::nullopt);
        Value golden = rr.outcome.results[0].second;
        for (size_t i = 0; i < v.masks.size(); ++i) {
            Value flipped = Value::from_bits(ValueType::I64, a ^ v.masks[i]);
            Outcome o = eval_line(std::string("%r = ") + op + " i64 " + lit(flipped) + ", " +
                                  Value::i64(static_cast<std::int64_t>(b)).to_text());
            bool same = o.results[0].second == golden;
            if (v.bits[i].masked != same) {
                CAPTURE(op);
                CAPTURE(i);
                CHECK(v.bits[i].masked == same);
            }
        }
    }
}
