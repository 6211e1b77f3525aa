"""Random generators: well-typed core terms and well-scoped declarations."""

import random

from idt import kernel as K
from idt import surface as S
from idt import terms as T
from idt import values as V


class TermGen:
    """Type-directed generation of well-typed core terms in a session context
    that provides Nat and plus."""

    def __init__(self, sess, seed: int):
        self.sess = sess
        self.rng = random.Random(seed)
        self.ctx = sess.ctx
        self.nat = sess.datatypes["Nat"].value
        ix, entry = self.ctx.lookup("plus")
        self.plus_ix = ix
        self.bool_enum = V.VConsE(V.VTag("tt"), V.VConsE(V.VTag("ff"), V.VNilE()))

    def type_palette(self, depth: int):
        opts = [
            lambda: V.VUnit(),
            lambda: self.nat,
            lambda: V.VEnumT(self.bool_enum),
        ]
        if depth > 0:
            opts += [
                lambda: V.VPi("x", self.pick_type(depth - 1), self._const(self.pick_type(depth - 1))),
                lambda: V.VSigma("x", self.pick_type(depth - 1), self._const(self.pick_type(depth - 1))),
            ]
        return opts

    def _const(self, v):
        return V.PyClo(lambda _x: v)

    def pick_type(self, depth: int) -> V.Value:
        return self.rng.choice(self.type_palette(depth))()

    def numeral(self, k: int) -> T.Term:
        t = T.In(T.Pair(T.ZeroE(), T.Void()))
        for _ in range(k):
            t = T.In(T.Pair(T.SucE(T.ZeroE()), T.Pair(t, T.Void())))
        return t

    def gen(self, ctx: K.Context, ty: V.Value, depth: int) -> T.Term:
        rng = self.rng
        # sometimes use a matching variable
        if depth > 0 and rng.random() < 0.25:
            cands = []
            for ix in range(min(ctx.depth - self.sess.ctx.depth, 8)):
                if K.conv(ctx, ctx.entry_at(ix).ty, ty):
                    cands.append(ix)
            if cands:
                return T.Var(rng.choice(cands))
        # sometimes wrap in an identity beta-redex (the body must stay
        # synthesizable for the checker's application rule)
        if depth > 0 and rng.random() < 0.2:
            inner = self.gen(ctx, ty, depth - 1)
            return T.App(T.Lam("r", V.quote(ty, ctx.depth), T.Var(0)), inner)
        if isinstance(ty, V.VUnit):
            return T.Void()
        if isinstance(ty, V.VEnumT):
            tags = V.enum_tags(ty.enum) or ["x"]
            k = rng.randrange(len(tags))
            t: T.Term = T.ZeroE()
            for _ in range(k):
                t = T.SucE(t)
            return t
        if isinstance(ty, V.VIMu):  # Nat
            if depth > 0 and rng.random() < 0.4:
                a = self.gen(ctx, ty, depth - 1)
                b = self.gen(ctx, ty, depth - 1)
                plus_ix = ctx.depth - 1 - (self.sess.ctx.depth - 1 - self.plus_ix)
                return T.App(T.App(T.Var(plus_ix), a), b)
            return self.numeral(rng.randrange(4))
        if isinstance(ty, V.VPi):
            inner = ctx.extend("x", ty.dom)
            body = self.gen(inner, ty.cod(V.fresh(ctx.depth)), depth - 1)
            return T.Lam("x", V.quote(ty.dom, ctx.depth), body)
        if isinstance(ty, V.VSigma):
            a = self.gen(ctx, ty.dom, depth - 1)
            b = self.gen(ctx, ty.cod(ctx.eval(a)), depth - 1)
            return T.Pair(a, b)
        return T.Void()

    def sample(self, depth: int = 3):
        ty = self.pick_type(2)
        t = self.gen(self.ctx, ty, depth)
        return t, ty


# --- random well-scoped data declarations ---------------------------------------


def gen_data_decl(rng: random.Random, name: str) -> S.DataDecl:
    """A random well-scoped declaration over the prelude's Nat and Bool."""
    n_params = rng.randrange(0, 2)
    params = tuple((f"P{i}", S.ESet(0)) for i in range(n_params))
    if n_params and rng.random() < 0.25:
        # a dependent telescope: an element of the first parameter
        params = params + (("pe", S.EVar("P0")),)
    indexed = rng.random() < 0.5
    indices = (("n", S.EVar("Nat")),) if indexed else ()

    def ref_self(ctx_args, idx_expr=None):
        e: S.ExtTerm = S.EVar(name)
        for p, _ in params:
            e = S.EApp(e, S.EVar(p))
        if indexed:
            e = S.EApp(e, idx_expr if idx_expr is not None else S.ENum(rng.randrange(3)))
        return e

    def arg_type(bound_nats, allow_rec=True, idx_expr=None):
        roll = rng.random()
        if n_params and roll < 0.3:
            return S.EVar(params[rng.randrange(n_params)][0])
        if roll < 0.55:
            return S.EVar("Nat")
        if allow_rec and roll < 0.8:
            return ref_self(None, idx_expr)
        if allow_rec and roll < 0.9:
            return S.EPi("t", S.EVar("Nat"), ref_self(None, idx_expr))
        return S.EUnit()

    clauses = []
    style_by = indexed and rng.random() < 0.5
    by_kind = "rec" if (style_by and rng.random() < 0.3) else "case"
    n_cons = rng.randrange(0 if not style_by else 1, 3)
    used = set()

    def fresh_tag(base):
        t = base
        k = 0
        while t in used:
            k += 1
            t = f"{base}{k}"
        used.add(t)
        return t

    if style_by:
        sub = []
        for variant, idx_vars in (("zero", ()), ("suc", ("m",))):
            tag = fresh_tag(f"c{variant}")
            args = []
            bound = list(idx_vars)
            for j in range(rng.randrange(0, 3)):
                idx = S.EVar(bound[0]) if bound and rng.random() < 0.7 else S.ENum(rng.randrange(2))
                args.append((f"a{j}", arg_type(bound, idx_expr=idx)))
            refined = (
                S.IRefined(variant, tuple(idx_vars)) if idx_vars else S.IVar(variant)
            )
            head = S.HeadPattern(
                name,
                tuple([S.PVar(p) for p, _ in params]) + (S.PIndex(refined),),
            )
            sub.append(S.Clause(head, S.CtorDecl(tag, tuple(args)), None))
        head = S.HeadPattern(
            name, tuple([S.PVar(p) for p, _ in params]) + (S.PIndex(S.IVar("n")),)
        )
        clauses.append(S.Clause(head, None, S.ByBlock(by_kind, "n", tuple(sub))))
    else:
        for i in range(n_cons):
            tag = fresh_tag(f"mk{i}")
            args = []
            arg_names = []
            for j in range(rng.randrange(0, 3)):
                nm = f"a{j}"
                prev_nats = [
                    an for an, at in args if isinstance(at, S.EVar) and at.name == "Nat"
                ]
                idx = (
                    S.EVar(prev_nats[-1])
                    if indexed and prev_nats and rng.random() < 0.5
                    else S.ENum(rng.randrange(2))
                )
                args.append((nm, arg_type(arg_names, idx_expr=idx)))
                arg_names.append(nm)
            pargs = [S.PVar(p) for p, _ in params]
            if indexed:
                prev_nats = [an for an, at in args if isinstance(at, S.EVar) and at.name == "Nat"]
                if prev_nats and rng.random() < 0.6:
                    val: S.ExtTerm = S.EApp(S.EVar("suc"), S.EVar(prev_nats[0]))
                else:
                    val = S.ENum(rng.randrange(3))
                pargs.append(S.PIndex(S.IConstraint("n", val)))
            head = S.HeadPattern(name, tuple(pargs))
            clauses.append(S.Clause(head, S.CtorDecl(tag, tuple(args)), None))
    return S.DataDecl(name, params, indices, tuple(clauses), ())


def gen_let_decl(rng: random.Random, name: str) -> S.LetDecl:
    """A random recursive program over Nat in one of a few shapes."""
    shape = rng.randrange(3)
    if shape == 0:
        # constant or projection
        body = S.ENum(rng.randrange(4)) if rng.random() < 0.5 else S.EVar("x")
        return S.LetDecl(
            name,
            (("x", S.EVar("Nat")),),
            S.EVar("Nat"),
            S.PReturn(S.ProgHead(name, (S.ProgPatVar("x"),)), body),
        )
    if shape == 1:
        # case analysis
        z_body = S.ENum(rng.randrange(3))
        s_body = S.EVar("m") if rng.random() < 0.5 else S.ENum(rng.randrange(3))
        return S.LetDecl(
            name,
            (("x", S.EVar("Nat")),),
            S.EVar("Nat"),
            S.PBy(
                S.ProgHead(name, (S.ProgPatVar("x"),)),
                "case",
                "x",
                (
                    S.PReturn(S.ProgHead(name, (S.ProgPatVar("zero"),)), z_body),
                    S.PReturn(S.ProgHead(name, (S.ProgPatCon("suc", ("m",)),)), s_body),
                ),
            ),
        )
    # structural recursion (plus-like)
    step = S.EApp(S.EVar("suc"), S.EApp(S.EApp(S.EVar(name), S.EVar("m")), S.EVar("y")))
    if rng.random() < 0.4:
        step = S.EApp(S.EApp(S.EVar(name), S.EVar("m")), S.EVar("y"))
    return S.LetDecl(
        name,
        (("x", S.EVar("Nat")), ("y", S.EVar("Nat"))),
        S.EVar("Nat"),
        S.PBy(
            S.ProgHead(name, (S.ProgPatVar("x"), S.ProgPatVar("y"))),
            "rec",
            "x",
            (
                S.PReturn(S.ProgHead(name, (S.ProgPatVar("zero"), S.ProgPatVar("y"))), S.EVar("y")),
                S.PReturn(
                    S.ProgHead(name, (S.ProgPatCon("suc", ("m",)), S.ProgPatVar("y"))), step
                ),
            ),
        ),
    )
