#include "arat/kernels.hpp"

#include <stdexcept>

namespace arat {

namespace {

const char* k_chain_k_ir = R"ir(# overwrite-chain demo: every source fault funnels through one scratch cell
# that is later cleared, so propagation always resolves by overwrite
input src f64 8 = [0.5, 1.25, 2, -0.75, 3.5, 1, -2.25, 0.125]
alloc scratch f64 1

entry:
  br loop
loop:
  %j = phi i64 [0, entry], [%jn, loop]
  %a = gep f64 @src, %j
  %x = load f64 %a
  %y = fadd f64 %x, 1.5 !label "chain"
  %z = fadd f64 %y, %y
  store f64 %z, @scratch
  %jn = add i64 %j, 1
  %c = icmp slt i64 %jn, 8
  condbr %c, loop, done
done:
  store f64 0.0, @scratch
  %f = load f64 @scratch
  call void print(%f)
  ret %f
)ir";

const char* k_chain_k_config = R"ir(k 10
pattern single
accept exact
)ir";

const char* k_l2norm_ir = R"ir(# squared-sum reduction over a strided slab with five plane accumulators
input nz0 i64 = 3
input jst i64 = 1
input jend i64 = 2
input ist i64 = 1
input iend i64 = 2
input norm_div f64 = 5.0
input v f64 135 = [-1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1]
alloc sum f64 5

entry:
  %i3max = sub i64 %nz0, 1
  %i2lo = add i64 %jst, 1
  %i1lo = add i64 %ist, 1
  br zeroL
zeroL:
  %mz = phi i64 [0, entry], [%mzn, zeroL]
  %az = gep f64 @sum, %mz
  store f64 0.0, %az !label "A"
  %mzn = add i64 %mz, 1
  %cz = icmp slt i64 %mzn, 5
  condbr %cz, zeroL, i3pre
i3pre:
  %c3e = icmp sle i64 2, %i3max
  condbr %c3e, i3head, cpre
i3head:
  %i3 = phi i64 [2, i3pre], [%i3n, i3latch]
  %c2e = icmp sle i64 %i2lo, %jend
  condbr %c2e, i2head, i3latch
i2head:
  %i2 = phi i64 [%i2lo, i3head], [%i2n, i2latch]
  %c1e = icmp sle i64 %i1lo, %iend
  condbr %c1e, i1head, i2latch
i1head:
  %i1 = phi i64 [%i1lo, i2head], [%i1n, i1latch]
  %t1 = sub i64 %i1, 1
  %t2 = sub i64 %i2, 1
  %t3 = sub i64 %i3, 1
  %s1 = mul i64 %t1, 5
  %s2 = mul i64 %t2, 15
  %s3 = mul i64 %t3, 45
  %x0 = add i64 %s1, %s2
  %base = add i64 %x0, %s3
  br mloop
mloop:
  %m = phi i64 [0, i1head], [%mn, mloop]
  %idx = add i64 %base, %m
  %va = gep f64 @v, %idx
  %sa = gep f64 @sum, %m
  %sv = load f64 %sa
  %vv = load f64 %va
  %sq = fmul f64 %vv, %vv !label "B"
  %ns = fadd f64 %sv, %sq
  store f64 %ns, %sa
  %mn = add i64 %m, 1
  %cm = icmp slt i64 %mn, 5
  condbr %cm, mloop, i1latch
i1latch:
  %i1n = add i64 %i1, 1
  %c1 = icmp sle i64 %i1n, %iend
  condbr %c1, i1head, i2latch
i2latch:
  %i2n = add i64 %i2, 1
  %c2 = icmp sle i64 %i2n, %jend
  condbr %c2, i2head, i3latch
i3latch:
  %i3n = add i64 %i3, 1
  %c3 = icmp sle i64 %i3n, %i3max
  condbr %c3, i3head, cpre
cpre:
  br cloop
cloop:
  %mf = phi i64 [0, cpre], [%mfn, cloop]
  %ca = gep f64 @sum, %mf
  %cv = load f64 %ca
  %cd = fdiv f64 %cv, %norm_div
  %cs = call f64 sqrt(%cd) !label "C"
  store f64 %cs, %ca
  call void print(%cs)
  %mfn = add i64 %mf, 1
  %cc = icmp slt i64 %mfn, 5
  condbr %cc, cloop, done
done:
  %final = load f64 @sum
  ret %final
)ir";

const char* k_l2norm_config = R"ir(k 10
pattern single
accept exact
shadow v rel 0.001
)ir";

const char* k_mmul_ir = R"ir(# register-accumulated matrix product with a checked output pass
input p i64 = 4
input q i64 = 4
input r i64 = 4
input A f64 16 = [-2, -1.75, -1.5, -1.25, -1, -0.75, -0.5, -0.25, 0, 0.25, 0.5, 0.75, 1, 1.25, 1.5, 1.75]
input B f64 16 = [1, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25, 0.125, 0, -0.125, -0.25, -0.375, -0.5, -0.625, -0.75, -0.875]
alloc C f64 16

entry:
  br iL
iL:
  %i = phi i64 [0, entry], [%in, iLatch]
  br jL
jL:
  %j = phi i64 [0, iL], [%jn, jTail]
  br kL
kL:
  %k = phi i64 [0, jL], [%kn, kL]
  %acc = phi f64 [0.0, jL], [%acc1, kL]
  %aoff = mul i64 %i, %q
  %ai = add i64 %aoff, %k
  %aa = gep f64 @A, %ai
  %av = load f64 %aa
  %boff = mul i64 %k, %r
  %bi = add i64 %boff, %j
  %ba = gep f64 @B, %bi
  %bv = load f64 %ba
  %prod = fmul f64 %av, %bv
  %acc1 = fadd f64 %acc, %prod
  %kn = add i64 %k, 1
  %ck = icmp slt i64 %kn, %q
  condbr %ck, kL, jTail
jTail:
  %coff = mul i64 %i, %r
  %ci = add i64 %coff, %j
  %ca = gep f64 @C, %ci
  store f64 %acc1, %ca
  %jn = add i64 %j, 1
  %cj = icmp slt i64 %jn, %r
  condbr %cj, jL, iLatch
iLatch:
  %in = add i64 %i, 1
  %cin = icmp slt i64 %in, %p
  condbr %cin, iL, oPre
oPre:
  %cells = mul i64 %p, %r
  br oL
oL:
  %x = phi i64 [0, oPre], [%xn, oL]
  %nacc = phi f64 [0.0, oPre], [%nacc1, oL]
  %oa = gep f64 @C, %x
  %c1 = load f64 %oa
  call void print(%c1)
  %c2 = load f64 %oa
  %scaled = fmul f64 %c2, 1.5
  %nacc1 = fadd f64 %nacc, %scaled
  %xn = add i64 %x, 1
  %cx = icmp slt i64 %xn, %cells
  condbr %cx, oL, done
done:
  call void print(%nacc1)
  ret %nacc1
)ir";

const char* k_mmul_config = R"ir(k 10
pattern single
accept exact
)ir";

const char* k_mmul_2x2_inputs = R"ir(p 2
q 2
r 2
A 1.0 2.0 3.0 4.0
B 0.5 -1.0 2.5 0.25
)ir";

const char* k_abft_mmul_ir = R"ir(# checksum-protected product: row and column sums are carried through the
# multiply, then a branch-free verify rebuilds and repairs one bad cell.
# inputs stay integral so checksum comparisons are exact in f64
input A f64 10 = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
input B f64 10 = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]
alloc aenc f64 15
alloc benc f64 15
alloc C f64 9
alloc scratch i64 1

entry:
  br encA
encA:
  %ek = phi i64 [0, entry], [%ekn, encA]
  %a0a = gep f64 @A, %ek
  %a0 = load f64 %a0a
  %ek5 = add i64 %ek, 5
  %a1a = gep f64 @A, %ek5
  %a1 = load f64 %a1a
  %d0 = gep f64 @aenc, %ek
  store f64 %a0, %d0
  %d1 = gep f64 @aenc, %ek5
  store f64 %a1, %d1
  %csum = fadd f64 %a0, %a1
  %ek10 = add i64 %ek, 10
  %d2 = gep f64 @aenc, %ek10
  store f64 %csum, %d2
  %ekn = add i64 %ek, 1
  %cek = icmp slt i64 %ekn, 5
  condbr %cek, encA, encB
encB:
  %fk = phi i64 [0, encA], [%fkn, encB]
  %fk2 = mul i64 %fk, 2
  %b0a = gep f64 @B, %fk2
  %b0 = load f64 %b0a
  %fk21 = add i64 %fk2, 1
  %b1a = gep f64 @B, %fk21
  %b1 = load f64 %b1a
  %fk3 = mul i64 %fk, 3
  %e0 = gep f64 @benc, %fk3
  store f64 %b0, %e0
  %fk31 = add i64 %fk3, 1
  %e1 = gep f64 @benc, %fk31
  store f64 %b1, %e1
  %rsum = fadd f64 %b0, %b1
  %fk32 = add i64 %fk3, 2
  %e2 = gep f64 @benc, %fk32
  store f64 %rsum, %e2
  %fkn = add i64 %fk, 1
  %cfk = icmp slt i64 %fkn, 5
  condbr %cfk, encB, mi
mi:
  %i = phi i64 [0, encB], [%in, milatch]
  br mj
mj:
  %j = phi i64 [0, mi], [%jn, mjlatch]
  %cix = mul i64 %i, 3
  %cio = add i64 %cix, %j
  %cad = gep f64 @C, %cio
  br mk
mk:
  %k = phi i64 [0, mj], [%kn, mk]
  %cv = load f64 %cad
  %aix = mul i64 %i, 5
  %aio = add i64 %aix, %k
  %aad = gep f64 @aenc, %aio
  %av = load f64 %aad
  %bix = mul i64 %k, 3
  %bio = add i64 %bix, %j
  %bad = gep f64 @benc, %bio
  %bv = load f64 %bad
  %pr = fmul f64 %av, %bv
  %nc = fadd f64 %cv, %pr
  store f64 %nc, %cad
  %kn = add i64 %k, 1
  %ck = icmp slt i64 %kn, 5
  condbr %ck, mk, mjlatch
mjlatch:
  %jn = add i64 %j, 1
  %cj = icmp slt i64 %jn, 3
  condbr %cj, mj, milatch
milatch:
  %in = add i64 %i, 1
  %ci = icmp slt i64 %in, 3
  condbr %ci, mi, verify
verify:
  %o00a = gep f64 @C, 0
  %o00 = load f64 %o00a
  %o01a = gep f64 @C, 1
  %o01 = load f64 %o01a
  %m0a = gep f64 @C, 2
  %m0 = load f64 %m0a
  %o10a = gep f64 @C, 3
  %o10 = load f64 %o10a
  %o11a = gep f64 @C, 4
  %o11 = load f64 %o11a
  %m1a = gep f64 @C, 5
  %m1 = load f64 %m1a
  %n0a = gep f64 @C, 6
  %n0 = load f64 %n0a
  %n1a = gep f64 @C, 7
  %n1 = load f64 %n1a
  %rs0 = fadd f64 %o00, %o01
  %rr0 = fsub f64 %m0, %rs0
  %rs1 = fadd f64 %o10, %o11
  %rr1 = fsub f64 %m1, %rs1
  %cs0 = fadd f64 %o00, %o10
  %cc0 = fsub f64 %n0, %cs0
  %cs1 = fadd f64 %o01, %o11
  %cc1 = fsub f64 %n1, %cs1
  %ir0 = fcmp une f64 %rr0, 0.0
  %ir1 = fcmp une f64 %rr1, 0.0
  %ic0 = fcmp une f64 %cc0, 0.0
  %ic1 = fcmp une f64 %cc1, 0.0
  %mr0 = sext i1 %ir0 to i64
  %mr1 = sext i1 %ir1 to i64
  %mc0 = sext i1 %ic0 to i64
  %mc1 = sext i1 %ic1 to i64
  %m00 = and i64 %mr0, %mc0
  %m01 = and i64 %mr0, %mc1
  %m10 = and i64 %mr1, %mc0
  %m11 = and i64 %mr1, %mc1
  %rb00 = fsub f64 %m0, %o01
  %rb01 = fsub f64 %m0, %o00
  %rb10 = fsub f64 %m1, %o11
  %rb11 = fsub f64 %m1, %o10
  store f64 %o00, @scratch
  %po00 = load i64 @scratch
  store f64 %rb00, @scratch
  %prb00 = load i64 @scratch
  %x00 = xor i64 %po00, %prb00
  %g00 = and i64 %x00, %m00
  %s00 = xor i64 %po00, %g00
  store i64 %s00, @scratch
  %sel00 = load f64 @scratch
  store f64 %o01, @scratch
  %po01 = load i64 @scratch
  store f64 %rb01, @scratch
  %prb01 = load i64 @scratch
  %x01 = xor i64 %po01, %prb01
  %g01 = and i64 %x01, %m01
  %s01 = xor i64 %po01, %g01
  store i64 %s01, @scratch
  %sel01 = load f64 @scratch
  store f64 %o10, @scratch
  %po10 = load i64 @scratch
  store f64 %rb10, @scratch
  %prb10 = load i64 @scratch
  %x10 = xor i64 %po10, %prb10
  %g10 = and i64 %x10, %m10
  %s10 = xor i64 %po10, %g10
  store i64 %s10, @scratch
  %sel10 = load f64 @scratch
  store f64 %o11, @scratch
  %po11 = load i64 @scratch
  store f64 %rb11, @scratch
  %prb11 = load i64 @scratch
  %x11 = xor i64 %po11, %prb11
  %g11 = and i64 %x11, %m11
  %s11 = xor i64 %po11, %g11
  store i64 %s11, @scratch
  %sel11 = load f64 @scratch
  store i64 0, @scratch
  br correct
correct:
  store f64 %sel00, %o00a
  store f64 %sel01, %o01a
  store f64 %sel10, %o10a
  store f64 %sel11, %o11a
  br refresh
refresh:
  %nm0 = fadd f64 %sel00, %sel01
  store f64 %nm0, %m0a
  %nm1 = fadd f64 %sel10, %sel11
  store f64 %nm1, %m1a
  %nn0 = fadd f64 %sel00, %sel10
  store f64 %nn0, %n0a
  %nn1 = fadd f64 %sel01, %sel11
  store f64 %nn1, %n1a
  %ncr = fadd f64 %nm0, %nm1
  %cra = gep f64 @C, 8
  store f64 %ncr, %cra
  br output
output:
  call void print(%sel00)
  call void print(%sel01)
  call void print(%sel10)
  call void print(%sel11)
  ret %sel00, %sel01, %sel10, %sel11
)ir";

const char* k_abft_mmul_config = R"ir(k 50
pattern single
accept exact
)ir";

const char* k_cg_lite_ir = R"ir(# conjugate gradient on a small SPD tridiagonal system in CSR form;
# the final check recomputes the residual against a pristine dense copy
input rowptr i64 17 = [0, 2, 5, 8, 11, 14, 17, 20, 23, 26, 29, 32, 35, 38, 41, 44, 46]
input colidx_like i64 46 = [0, 1, 0, 1, 2, 1, 2, 3, 2, 3, 4, 3, 4, 5, 4, 5, 6, 5, 6, 7, 6, 7, 8, 7, 8, 9, 8, 9, 10, 9, 10, 11, 10, 11, 12, 11, 12, 13, 12, 13, 14, 13, 14, 15, 14, 15]
input avals f64 46 = [2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2, -1, -1, 2]
input b f64 16 = [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]
input adense f64 256 = [2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 2]
alloc x_like f64 16
alloc r_like f64 16
alloc p f64 16
alloc ap f64 16

entry:
  br initL
initL:
  %ii = phi i64 [0, entry], [%iin, initL]
  %bbacc = phi f64 [0.0, entry], [%bbacc1, initL]
  %ba = gep f64 @b, %ii
  %bv = load f64 %ba
  %ra = gep f64 @r_like, %ii
  store f64 %bv, %ra
  %pa = gep f64 @p, %ii
  store f64 %bv, %pa
  %bb1 = fmul f64 %bv, %bv
  %bbacc1 = fadd f64 %bbacc, %bb1
  %iin = add i64 %ii, 1
  %cii = icmp slt i64 %iin, 16
  condbr %cii, initL, loopHead
loopHead:
  %iter = phi i64 [0, initL], [%itern, loopLatch]
  %rr = phi f64 [%bbacc1, initL], [%rracc1, loopLatch]
  %thresh = fmul f64 %bbacc1, 1e-18
  %cg = fcmp ogt f64 %rr, %thresh
  %cit = icmp slt i64 %iter, 64
  %cont = and i1 %cg, %cit
  condbr %cont, matvecOuter, ftL
matvecOuter:
  %mi = phi i64 [0, loopHead], [%min, matvecTail]
  %rpa = gep i64 @rowptr, %mi
  %j0 = load i64 %rpa
  %mi1 = add i64 %mi, 1
  %rpa1 = gep i64 @rowptr, %mi1
  %j1 = load i64 %rpa1
  br matvecInner
matvecInner:
  %jj = phi i64 [%j0, matvecOuter], [%jjn, matvecInner]
  %mvacc = phi f64 [0.0, matvecOuter], [%mvacc1, matvecInner]
  %cia = gep i64 @colidx_like, %jj
  %col = load i64 %cia
  %pva = gep f64 @p, %col
  %pv = load f64 %pva
  %ava = gep f64 @avals, %jj
  %av = load f64 %ava
  %prod = fmul f64 %av, %pv
  %mvacc1 = fadd f64 %mvacc, %prod
  %jjn = add i64 %jj, 1
  %cjj = icmp slt i64 %jjn, %j1
  condbr %cjj, matvecInner, matvecTail
matvecTail:
  %apa = gep f64 @ap, %mi
  store f64 %mvacc1, %apa
  %min = add i64 %mi, 1
  %cmi = icmp slt i64 %min, 16
  condbr %cmi, matvecOuter, papL
papL:
  %di = phi i64 [0, matvecTail], [%din, papL]
  %dacc = phi f64 [0.0, matvecTail], [%dacc1, papL]
  %dpa = gep f64 @p, %di
  %dpv = load f64 %dpa
  %dapa = gep f64 @ap, %di
  %dapv = load f64 %dapa
  %dp = fmul f64 %dpv, %dapv
  %dacc1 = fadd f64 %dacc, %dp
  %din = add i64 %di, 1
  %cdi = icmp slt i64 %din, 16
  condbr %cdi, papL, alphaB
alphaB:
  %alpha = fdiv f64 %rr, %dacc1
  br xrL
xrL:
  %ui = phi i64 [0, alphaB], [%uin, xrL]
  %rracc = phi f64 [0.0, alphaB], [%rracc1, xrL]
  %upa = gep f64 @p, %ui
  %upv = load f64 %upa
  %uxa = gep f64 @x_like, %ui
  %uxv = load f64 %uxa
  %axv = fmul f64 %alpha, %upv
  %nx = fadd f64 %uxv, %axv
  store f64 %nx, %uxa
  %uapa = gep f64 @ap, %ui
  %uapv = load f64 %uapa
  %aap = fmul f64 %alpha, %uapv
  %ura = gep f64 @r_like, %ui
  %urv = load f64 %ura
  %nr = fsub f64 %urv, %aap
  store f64 %nr, %ura
  %rsq = fmul f64 %nr, %nr
  %rracc1 = fadd f64 %rracc, %rsq
  %uin = add i64 %ui, 1
  %cui = icmp slt i64 %uin, 16
  condbr %cui, xrL, betaB
betaB:
  %beta = fdiv f64 %rracc1, %rr
  br pL
pL:
  %pi = phi i64 [0, betaB], [%pin, pL]
  %ppa = gep f64 @p, %pi
  %ppv = load f64 %ppa
  %bp = fmul f64 %beta, %ppv
  %pra = gep f64 @r_like, %pi
  %prv = load f64 %pra
  %np = fadd f64 %prv, %bp
  store f64 %np, %ppa
  %pin = add i64 %pi, 1
  %cpi = icmp slt i64 %pin, 16
  condbr %cpi, pL, loopLatch
loopLatch:
  %itern = add i64 %iter, 1
  br loopHead
ftL:
  %fi = phi i64 [0, loopHead], [%fin, ftTail]
  %fracc = phi f64 [0.0, loopHead], [%fracc2, ftTail]
  %fbase = mul i64 %fi, 16
  br ftInner
ftInner:
  %fj = phi i64 [0, ftL], [%fjn, ftInner]
  %facc = phi f64 [0.0, ftL], [%facc1, ftInner]
  %fai = add i64 %fbase, %fj
  %faa = gep f64 @adense, %fai
  %fav = load f64 %faa
  %fxa = gep f64 @x_like, %fj
  %fxv = load f64 %fxa
  %fprod = fmul f64 %fav, %fxv
  %facc1 = fadd f64 %facc, %fprod
  %fjn = add i64 %fj, 1
  %cfj = icmp slt i64 %fjn, 16
  condbr %cfj, ftInner, ftTail
ftTail:
  %fba = gep f64 @b, %fi
  %fbv = load f64 %fba
  %rt = fsub f64 %fbv, %facc1
  %rt2 = fmul f64 %rt, %rt
  %fracc2 = fadd f64 %fracc, %rt2
  %fin = add i64 %fi, 1
  %cfi = icmp slt i64 %fin, 16
  condbr %cfi, ftL, resB
resB:
  %relsq = fdiv f64 %fracc2, %bbacc1
  %residual = call f64 sqrt(%relsq)
  call void print(%iter)
  call void print(%residual)
  ret %residual
)ir";

const char* k_cg_lite_config = R"ir(k 10
pattern single
accept conv:residual:1e-8
)ir";

} // namespace

const std::vector<KernelSpec>& kernel_registry() {
    static const std::vector<KernelSpec> regs = {
        {"chain_k", k_chain_k_ir, k_chain_k_config, {"src"}, {}},
        {"l2norm", k_l2norm_ir, k_l2norm_config, {"sum", "v"}, {}},
        {"mmul", k_mmul_ir, k_mmul_config, {"A", "B", "C"}, {{"2x2", k_mmul_2x2_inputs}}},
        {"abft_mmul", k_abft_mmul_ir, k_abft_mmul_config, {"C"}, {}},
        {"cg_lite", k_cg_lite_ir, k_cg_lite_config, {"colidx_like", "r_like", "x_like", "b"}, {}},
    };
    return regs;
}

const KernelSpec& kernel(const std::string& name) {
    for (const auto& k : kernel_registry())
        if (k.name == name) return k;
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

const std::string* kernel_inputs(const KernelSpec& k, const std::string& label) {
    for (const auto& [l, text] : k.inputs)
        if (l == label) return &text;
    return nullptr;
}

} // namespace arat
