"""The description universes: interpretation, inductive hypotheses, the
elimination principle, and the code dump printer."""

import pytest

from conftest import enum, tup, bare_nat_code, switch_fam, load_session

from idt import desc
from idt import kernel as K
from idt import terms as T
from idt import values as V


@pytest.fixture(scope="module")
def sess():
    return load_session("nat_tree_vec.idt")


def ctx0():
    return K.Context()


NatD = bare_nat_code()
Nat = T.Mu(NatD)


# --- interpretation ---------------------------------------------------------------


def test_interp_unit_clause():
    assert desc.interp_desc(ctx0(), T.DOne(), Nat) == T.Unit()


def test_interp_identity_functor_clause():
    got = desc.interp_desc(ctx0(), T.DVar(), Nat)
    assert got == K.normalize(ctx0(), Nat)


def test_interp_natd_unfolds_by_hand():
    # oracle: unfold the clauses manually — a 'sigma interprets to a pair of
    # the tag index and the payload computed by the lookup; at the argument
    # type Unit both payloads land at Unit, via different clauses
    v = V.vinterp(ctx0().eval(NatD), V.VUnit())
    assert isinstance(v, V.VSigma)
    assert isinstance(v.dom, V.VEnumT)
    assert V.enum_tags(v.dom.enum) == ["zero", "suc"]
    assert isinstance(v.cod(V.VZeroE()), V.VUnit)
    assert isinstance(v.cod(V.VSucE(V.VZeroE())), V.VUnit)
    # at the argument type Mu NatD the recursive payload is the fix-point
    v2 = V.vinterp(ctx0().eval(NatD), ctx0().eval(Nat))
    suc_payload = v2.cod(V.VSucE(V.VZeroE()))
    assert V.quote(suc_payload, 0) == K.normalize(ctx0(), Nat)


def test_interp_idesc_var_clause():
    # 'var <(), m> interprets to X <(), m>
    ctx = ctx0().extend("X", V.VPi("_", V.VSigma("_", V.VUnit(), V.PyClo(lambda _: V.VUnit())), V.PyClo(lambda _: V.VSet(0))))
    ctx = ctx.extend("m", V.VUnit())
    code = T.DVarI(T.Pair(T.Void(), T.Var(0)))
    got = K.normalize(ctx, T.InterpIDesc(code, T.Var(1)))
    assert got == T.App(T.Var(1), T.Pair(T.Void(), T.Var(0)))


def test_interp_idesc_unit_clause():
    ctx = ctx0().extend("X", V.VPi("_", V.VUnit(), V.PyClo(lambda _: V.VSet(0))))
    assert K.normalize(ctx, T.InterpIDesc(T.DOne(), T.Var(0))) == T.Unit()


def test_interp_constrained_vec_telescope(sess):
    # unfold code_= at a neutral index: the vnil branch is the constrained
    # Sigma telescope
    ctx = sess.ctx.extend("n", sess.datatypes["Nat"].value)
    vec = sess.ctx.lookup("Vec")
    vecv = sess.datatypes["Vec"].value
    applied = V.vapps(vecv, V.VUnit(), V.fresh(sess.ctx.depth))
    assert isinstance(applied, V.VIMu)
    code = V.vapp(applied.fam, applied.index)
    tags, branches = desc.sigma_view(code)
    assert tags == ["vnil", "vcons"]
    xfam = V.VLam("j", V.PyClo(lambda j: V.VIMu(applied.ixty, applied.fam, j)))
    vnil_ty = V.vinterp_i(branches[0], xfam)
    # Sigma (n == zero) (\_. Unit)
    assert isinstance(vnil_ty, V.VSigma)
    assert isinstance(vnil_ty.dom, V.VEq)
    assert isinstance(vnil_ty.cod(V.VRefl()), V.VUnit)


# --- All ----------------------------------------------------------------------------


def oracle_all(code: V.Value, x: V.Value, p: V.Value, d: V.Value) -> V.Value:
    """Independent structural-recursion oracle for the inductive-hypothesis
    type."""
    if isinstance(code, V.VDVar):
        return V.vapp(p, d)
    if isinstance(code, V.VDOne):
        return V.VUnit()
    if isinstance(code, V.VDTimes):
        left = oracle_all(code.lhs, x, p, V.vfst(d))
        right = oracle_all(code.rhs, x, p, V.vsnd(d))
        return V.VSigma("_", left, V.PyClo(lambda _v: right))
    if isinstance(code, V.VDPi):
        return V.VPi(
            "s", code.dom, V.PyClo(lambda s: oracle_all(V.vapp(code.fam, s), x, p, V.vapp(d, s)))
        )
    if isinstance(code, (V.VDSigma, V.VDSigmaE)):
        return oracle_all(V.vapp(code.fam, V.vfst(d)), x, p, V.vsnd(d))
    raise AssertionError("bad code")


def test_all_unit_clause():
    got = desc.all_desc(ctx0(), T.DOne(), Nat, T.Lam("_", Nat, T.Unit()), T.Void())
    assert got == T.Unit()


def test_all_var_clause():
    ctx = ctx0().extend("P", V.VPi("_", ctx0().eval(Nat), V.PyClo(lambda _: V.VSet(0))))
    ctx = ctx.extend("x", ctx.eval(Nat))
    got = K.normalize(ctx, T.AllD(T.DVar(), Nat, T.Var(1), T.Var(0)))
    assert got == T.App(T.Var(1), T.Var(0))


def test_all_product_against_oracle():
    # All('var '* 'var) on a pair is P x * P y
    ctx = ctx0().extend("P", V.VPi("_", ctx0().eval(Nat), V.PyClo(lambda _: V.VSet(0))))
    ctx = ctx.extend("x", ctx.eval(Nat)).extend("y", ctx.eval(Nat))
    code = T.DTimes(T.DVar(), T.DVar())
    d = T.Pair(T.Var(1), T.Var(0))
    got = K.normalize(ctx, T.AllD(code, Nat, T.Var(2), d))
    want = V.quote(
        oracle_all(ctx.eval(code), ctx.eval(Nat), ctx.eval(T.Var(2)), ctx.eval(d)), ctx.depth
    )
    assert got == want


@pytest.mark.parametrize("seed", range(12))
def test_all_random_codes_against_oracle(seed):
    import random

    rng = random.Random(seed)

    def gen_code(depth):
        opts = [T.DVar(), T.DOne()]
        if depth > 0:
            opts += [
                T.DTimes(gen_code(depth - 1), gen_code(depth - 1)),
                T.DSigmaE(
                    enum("p", "q"),
                    switch_fam(enum("p", "q"), tup(gen_code(depth - 1), gen_code(depth - 1)), T.Desc()),
                ),
            ]
        return rng.choice(opts)

    code = gen_code(2)
    ctx = ctx0().extend("P", V.VPi("_", ctx0().eval(Nat), V.PyClo(lambda _: V.VSet(0))))
    # a canonical payload for the code
    def gen_payload(cv):
        if isinstance(cv, V.VDVar):
            return V.VIn(V.VPair(V.VZeroE(), V.VVoid()))
        if isinstance(cv, V.VDOne):
            return V.VVoid()
        if isinstance(cv, V.VDTimes):
            return V.VPair(gen_payload(cv.lhs), gen_payload(cv.rhs))
        if isinstance(cv, V.VDSigmaE):
            k = rng.randrange(2)
            return V.VPair(V.make_numeral(k), gen_payload(V.vapp(cv.fam, V.make_numeral(k))))
        raise AssertionError

    cv = ctx.eval(code)
    d = gen_payload(cv)
    got = K.normalize(ctx, T.AllD(code, Nat, T.Var(0), V.quote(d, ctx.depth)))
    want = V.quote(oracle_all(cv, ctx.eval(Nat), ctx.eval(T.Var(0)), d), ctx.depth)
    assert got == want


# --- elimination -------------------------------------------------------------------


def test_induction_zero_case_no_hypotheses():
    # induction NatD P m (In ('zero, void)) reduces to m ('zero, void) applied
    # to the trivial hypothesis
    ctx = ctx0().extend(
        "m",
        V.VPi(
            "d",
            V.vinterp(ctx0().eval(NatD), V.VMu(ctx0().eval(NatD))),
            V.PyClo(lambda _d: V.VUnit()),
        ),
    )
    P = T.Lam("_", Nat, T.Unit())
    method = T.Lam("d", None, T.Lam("h", None, T.App(T.Var(2), T.Var(1))))
    zero = T.In(T.Pair(T.ZeroE(), T.Void()))
    got = K.normalize(ctx, T.Induction(NatD, P, method, zero))
    assert got == K.normalize(ctx, T.App(T.Var(0), T.Pair(T.ZeroE(), T.Void())))


def test_induction_recursive_unfolding():
    # double via induction reduces through the recursive hypothesis
    En = enum("zero", "suc")
    fam = switch_fam(En, tup(T.DOne(), T.DVar()), T.Desc())
    natd = T.DSigmaE(En, fam)
    nat = T.Mu(natd)
    zero = T.In(T.Pair(T.ZeroE(), T.Void()))

    def suc(n):
        return T.In(T.Pair(T.SucE(T.ZeroE()), n))

    PC = T.Lam(
        "c2",
        None,
        T.Pi(
            "a",
            T.InterpDesc(T.App(fam, T.Var(0)), nat),
            T.Pi("h2", T.AllD(T.App(fam, T.Var(1)), nat, T.Lam("_", nat, nat), T.Var(0)), nat),
        ),
    )
    B0 = T.Lam("a2", None, T.Lam("h2", None, zero))
    BS = T.Lam("a2", None, T.Lam("h2", None, suc(suc(T.Var(0)))))
    MSTEP = T.Lam(
        "c", None, T.Lam("a", None, T.App(T.Switch(En, PC, tup(B0, BS), T.Var(1)), T.Var(0)))
    )
    MS = T.Lam("p", None, T.Pi("hh", T.AllD(natd, nat, T.Lam("_", nat, nat), T.Var(0)), nat))
    METHOD = T.Lam("d", None, T.Lam("h", None, T.App(T.Split(MS, MSTEP, T.Var(1)), T.Var(0))))
    double = T.Lam("m", nat, T.Induction(natd, T.Lam("_", nat, nat), METHOD, T.Var(0)))
    ctx = ctx0()
    K.infer(ctx, double)

    def num(k):
        t = zero
        for _ in range(k):
            t = suc(t)
        return t

    for k in range(4):
        assert K.normalize(ctx, T.App(double, num(k))) == K.normalize(ctx, num(2 * k))


def test_builtin_signatures_roundtrip_through_infer():
    ctx = ctx0()
    assert K.infer(ctx, T.Mu(NatD)) == V.VSet(0)
    # In : interp D (Mu D) -> Mu D
    K.check(ctx, T.In(T.Pair(T.ZeroE(), T.Void())), ctx.eval(T.Mu(NatD)))
    # IMu R i : Set when R : I -> IDesc I
    r = T.Lam("j", T.Unit(), T.DOne())
    assert K.infer(ctx, T.IMu(T.Unit(), r, T.Void())) == V.VSet(0)


def test_functoriality_smoke():
    ctx = ctx0()
    redex = T.App(T.Lam("x", T.Set_(0), T.Var(0)), T.Unit())
    a = desc.interp_desc(ctx, NatD, T.Unit())
    b = desc.interp_desc(ctx, NatD, redex)
    assert a == b


def test_induction_computes_on_corpus_inhabitants(sess):
    # for canonical inhabitants the iota rule fires and the result re-checks
    from idt.elab import Elaborator
    from idt import surface as S

    ctx = sess.ctx
    natv = sess.datatypes["Nat"].value
    assert isinstance(natv, V.VIMu)
    el = Elaborator()
    terms = [el.check(ctx, S.parse_expr(str(k)), natv) for k in range(5)]
    motive = T.Lam("p", None, T.Unit())
    method = T.Lam("i", None, T.Lam("xs", None, T.Lam("h", None, T.Void())))
    for t in terms:
        res = T.IInduction(
            V.quote(natv.ixty, ctx.depth),
            V.quote(natv.fam, ctx.depth),
            motive,
            method,
            T.Void(),
            t,
        )
        nf = K.normalize(ctx, res)
        assert nf == T.Void()
        K.check(ctx, nf, V.VUnit())


# --- printer -------------------------------------------------------------------------


def test_print_code_golden_natd():
    assert desc.print_code(ctx0(), NatD) == "'sigma {zero,suc} [zero -> '1, suc -> 'var]"


def test_print_code_golden_one():
    assert desc.print_code(ctx0(), T.DOne()) == "'1"


def test_print_code_tree_shape():
    ctx = ctx0().extend("A", V.VSet(0))
    en = enum("leaf", "node")
    tree = T.DSigmaE(
        en,
        switch_fam(
            en,
            tup(
                T.DOne(),
                T.DTimes(T.DVar(), T.DSigma(T.Var(0), T.Lam("_", T.Var(0), T.DTimes(T.DVar(), T.DOne())))),
            ),
            T.Desc(),
        ),
    )
    out = desc.print_code(ctx, tree)
    assert out == "'sigma {leaf,node} [leaf -> '1, node -> 'var '* 'Sigma A (\\_. 'var '* '1)]"


def test_to_desc_code():
    code = T.DTimes(T.DVarI(T.Void()), T.DOne())
    assert desc.to_desc_code(code) == T.DTimes(T.DVar(), T.DOne())
