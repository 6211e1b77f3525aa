"""Elaboration of inductive definitions down to description codes.

A declaration's clauses elaborate against a description label; constructor
argument telescopes become right-nested 'Sigma codes, recursive positions
become 'varI codes carrying their extracted indices, index constraints
become trailing equality codes, and a trailing `by` block elaborates
through the restricted eliminator builder. Declarations without indices run
through the same pipeline with the degenerate Unit index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import kernel as K
from . import labels as L
from . import pp
from . import surface as S
from . import terms as T
from . import values as V
from .elab import ElabError, Elaborator
from .kernel import Context
from .terms import Term
from .values import Value


@dataclass
class TraceNode:
    kind: str
    text: str
    children: list = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f"{pad}{self.kind}: {self.text}"]
        for c in self.children:
            lines.append(c.render(indent + 1))
        return "\n".join(lines)


class Tracer:
    """Collects the derivation tree mirroring the judgment structure."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.root: Optional[TraceNode] = None
        self._stack: list = []

    def node(self, kind: str, text_fn):
        if not self.enabled:
            return _NullNode()
        node = TraceNode(kind, text_fn())
        if self._stack:
            self._stack[-1].children.append(node)
        else:
            self.root = node
        return _TracerCtx(self, node)


class _NullNode:
    def __enter__(self):
        return self

    def __exit__(self, *a):
        return False


class _TracerCtx:
    def __init__(self, tracer, node):
        self.tracer = tracer
        self.node = node

    def __enter__(self):
        self.tracer._stack.append(self.node)
        return self.node

    def __exit__(self, *a):
        self.tracer._stack.pop()
        return False


# --- elaborator-side description labels -------------------------------------


@dataclass(frozen=True)
class EParam:
    tm: Term
    ty: Term


@dataclass(frozen=True)
class EIndex:
    tm: Term
    ty: Term


@dataclass(frozen=True)
class EConstr:
    var: Term
    raw: S.ExtTerm  # elaborated late, under the constructor telescope
    ty: Term


@dataclass(frozen=True)
class ELabel:
    head: str
    entries: tuple

    def shift(self, by: int) -> "ELabel":
        out = []
        for e in self.entries:
            if isinstance(e, EParam):
                out.append(EParam(T.shift(e.tm, by), T.shift(e.ty, by)))
            elif isinstance(e, EIndex):
                out.append(EIndex(T.shift(e.tm, by), T.shift(e.ty, by)))
            else:
                out.append(EConstr(T.shift(e.var, by), e.raw, T.shift(e.ty, by)))
        return ELabel(self.head, tuple(out))

    def kernel_label(self, ctx: Context, el: Elaborator) -> T.DLabel:
        """The kernel form; constraint values elaborate in the given context."""
        entries = []
        for e in self.entries:
            if isinstance(e, EParam):
                entries.append(T.LParam(e.tm, e.ty))
            elif isinstance(e, EIndex):
                entries.append(T.LIndex(e.tm, e.ty))
            else:
                t = el.check(ctx, e.raw, ctx.eval(e.ty))
                entries.append(T.LConstraint(e.var, t, e.ty))
        return T.DLabel(self.head, tuple(entries))

    def index_type_value(self, ctx: Context) -> Value:
        ty: Value = V.VUnit()
        for e in self.entries:
            if isinstance(e, EParam):
                continue
            ity = ctx.eval(e.ty)
            prev = ty
            ty = V.VSigma("_", prev, V.PyClo(lambda _v, it=ity: it))
        return ty

    def describe(self, ctx: Context) -> str:
        names = ctx.names()
        parts = [self.head]
        for e in self.entries:
            if isinstance(e, EParam):
                parts.append(f"({pp.print_term(e.tm, names)})")
            elif isinstance(e, EIndex):
                parts.append(f"[{pp.print_term(e.tm, names)}]")
            else:
                parts.append(f"[{pp.print_term(e.var, names)} = {S.print_expr(e.raw)}]")
        return " ".join(parts)


@dataclass
class DataResult:
    name: str
    definiens: Term  # at the outer context
    ty: Term
    n_params: int
    n_indices: int
    code: Term  # at the telescope context (with the opaque self binding)
    tel_names: list
    tags: list
    trace: Optional[TraceNode]


# --- pattern validation ---------------------------------------------------------


def validate_pattern(ctx: Context, el: Elaborator, label: ELabel, head: S.HeadPattern):
    """Match a clause head against the label; returns (refined label, context
    extended with any constructor-pattern bindings)."""
    if head.name != label.head:
        raise ElabError(
            "PatternHeadMismatch",
            head.span,
            f"clause head '{head.name}' does not match the datatype '{label.head}'",
        )
    if len(head.args) != len(label.entries):
        raise ElabError(
            "PatternHeadMismatch",
            head.span,
            f"clause head has {len(head.args)} argument(s); the label has {len(label.entries)}",
        )
    inner = ctx
    shifted = 0
    out = []
    for pos, (pat, entry) in enumerate(zip(head.args, label.entries)):
        entry = _eshift(entry, shifted)
        if isinstance(entry, EParam):
            if not isinstance(pat, S.PVar):
                raise ElabError(
                    "PatternHeadMismatch",
                    getattr(pat, "span", head.span),
                    f"position {pos} is a parameter and must repeat the declared variable",
                )
            if not _is_var_named(inner, entry.tm, pat.name):
                raise ElabError(
                    "PatternHeadMismatch",
                    pat.span,
                    f"parameter position {pos} must be '{_var_name(inner, entry.tm)}', got '{pat.name}'",
                )
            out.append(entry)
            continue
        if isinstance(entry, EConstr):
            raise ElabError(
                "PatternHeadMismatch",
                getattr(pat, "span", head.span),
                f"position {pos} is already constrained",
            )
        assert isinstance(entry, EIndex)
        if not isinstance(pat, S.PIndex):
            raise ElabError(
                "PatternHeadMismatch",
                getattr(pat, "span", head.span),
                f"index position {pos} must be written in brackets",
            )
        ip = pat.pat
        entry_v = inner.eval(entry.tm)
        if isinstance(ip, S.IVar):
            if _is_var_named(inner, entry.tm, ip.name):
                out.append(entry)
                continue
            # under a by-refinement a bare name can be a nullary constructor
            # or an enumeration tag
            if _matches_enum_tag(inner, ip.name, entry_v, inner.eval(entry.ty)):
                out.append(entry)
                continue
            got = _bind_refined(inner, ip.name, (), entry_v, inner.eval(entry.ty), ip.span)
            if got is None:
                raise ElabError(
                    "PatternHeadMismatch",
                    ip.span,
                    f"index position {pos} expects '{pp.print_term(entry.tm, inner.names())}', got '{ip.name}'",
                )
            inner = got
            out.append(entry)
            continue
        if isinstance(ip, S.IConstraint):
            if not _is_var_named(inner, entry.tm, ip.name):
                raise ElabError(
                    "PatternHeadMismatch",
                    ip.span,
                    f"constraint must name the index variable "
                    f"'{_var_name(inner, entry.tm)}', got '{ip.name}'",
                )
            out.append(EConstr(entry.tm, ip.value, entry.ty))
            continue
        assert isinstance(ip, S.IRefined)
        got = _bind_refined(inner, ip.ctor, ip.vars, entry_v, inner.eval(entry.ty), ip.span)
        if got is None:
            raise ElabError(
                "PatternHeadMismatch",
                ip.span,
                f"constructor pattern '{ip.ctor}' does not match index position {pos}",
            )
        newly = got.depth - inner.depth
        inner = got
        if newly:
            out = [_eshift(e, newly) for e in out]
            shifted += newly
        out.append(EIndex(V.quote(entry_v, inner.depth), T.shift(entry.ty, newly)))
    return ELabel(label.head, tuple(out)), inner


def _eshift(entry, by: int):
    if by == 0:
        return entry
    if isinstance(entry, EParam):
        return EParam(T.shift(entry.tm, by), T.shift(entry.ty, by))
    if isinstance(entry, EIndex):
        return EIndex(T.shift(entry.tm, by), T.shift(entry.ty, by))
    return EConstr(T.shift(entry.var, by), entry.raw, T.shift(entry.ty, by))


def _is_var_named(ctx: Context, tm: Term, name: str) -> bool:
    if not isinstance(tm, T.Var):
        return False
    return ctx.entry_at(tm.ix).name == name


def _var_name(ctx: Context, tm: Term) -> str:
    if isinstance(tm, T.Var):
        return ctx.entry_at(tm.ix).name
    return pp.print_term(tm, ctx.names())


def _matches_enum_tag(ctx: Context, name: str, val: Value, tyv: Value) -> bool:
    """A by-refined enumeration index matches the pattern naming its tag."""
    if not isinstance(tyv, V.VEnumT):
        return False
    tags = V.enum_tags(tyv.enum)
    k = V.numeral_of(val)
    return tags is not None and k is not None and k < len(tags) and tags[k] == name


def _bind_refined(ctx: Context, ctor: str, vars_: tuple, val: Value, tyv: Value, span):
    """Bind a constructor pattern appearing at a by-refined index position."""
    try:
        return L._match_con_pattern(ctx, ctor, vars_, val, tyv, span)
    except ElabError:
        return None


# --- the judgments -------------------------------------------------------------


class DataElab:
    def __init__(self, el: Elaborator, self_level: int, tracer: Tracer, instrument: bool = False):
        self.el = el
        self.self_level = self_level  # context level of the opaque self binding
        self.tracer = tracer
        self.instrument = instrument  # assert the per-judgment typing lemmas

    def _self_index(self, ctx: Context) -> int:
        return ctx.depth - 1 - self.self_level

    def _positivity(self, ctx: Context, t: Term, span):
        if T.occurs(t, self._self_index(ctx)):
            raise ElabError(
                "NonPositive",
                span,
                "recursive occurrence in a non-recursive position",
            )

    # clause groups, with an optional trailing by-block
    def elab_data_patts(self, ctx: Context, clauses: tuple, label: ELabel, depth: int = 0) -> Term:
        if depth > 8:
            raise ElabError("ByDepthExceeded", None, "'by' nesting deeper than 8")
        with self.tracer.node(
            "ElabDataPatts", lambda: label.describe(ctx)
        ):
            tag_codes: List[Tuple[str, Term]] = []
            by_clause = None
            for c in clauses:
                if by_clause is not None:
                    raise ElabError(
                        "PatternHeadMismatch",
                        c.head.span,
                        "clauses after a 'by' block are not supported",
                    )
                if c.by is not None:
                    by_clause = c
                    continue
                rl, cctx = validate_pattern(ctx, self.el, label, c.head)
                with self.tracer.node("ElabChoices", lambda: rl.describe(cctx)):
                    tag, code = self.elab_constructor(cctx, c.ctor, rl)
                code = L._inline_defs(cctx, ctx, code)
                if any(tag == t0 for t0, _ in tag_codes):
                    raise ElabError(
                        "DuplicateConstructor", c.ctor.span, f"duplicate constructor '{tag}'"
                    )
                tag_codes.append((tag, code))
            if by_clause is not None:
                tag_codes.append(self._elab_by(ctx, by_clause, label, depth))
            out = self._assemble_ret(ctx, label, tag_codes)
            if self.instrument and not any(
                isinstance(e, EConstr) for e in label.entries
            ):
                K.check(
                    ctx,
                    out,
                    V.VDLabelTy(V.eval_label(label.kernel_label(ctx, self.el), ctx.env)),
                )
            return out

    def _assemble_ret(self, ctx: Context, label: ELabel, tag_codes: list) -> Term:
        enum_t: Term = T.NilE()
        for tag, _ in reversed(tag_codes):
            enum_t = T.ConsE(T.Tag(tag), enum_t)
        cases: Term = T.Void()
        for _, code in reversed(tag_codes):
            cases = T.Pair(code, cases)
        idx_ty = V.quote(label.index_type_value(ctx), ctx.depth)
        fam_body = T.Switch(
            T.shift(enum_t, 1),
            T.Lam("_", None, T.IDesc(T.shift(idx_ty, 2))),
            T.shift(cases, 1),
            T.Var(0),
        )
        fam = T.Lam("c", T.EnumT(enum_t), fam_body)
        return T.DRet(enum_t, fam)

    def _elab_by(self, ctx: Context, clause: S.Clause, label: ELabel, depth: int):
        rl, cctx = validate_pattern(ctx, self.el, label, clause.head)
        by = clause.by
        klabel = rl.kernel_label(cctx, self.el)
        goal = V.VDLabelTy(V.eval_label(klabel, cctx.env))
        try:
            res = L.ewm_restricted(cctx, by.kind, by.var, goal)
        except ElabError as e:
            if e.span is None:
                e.span = by.span
            raise
        with self.tracer.node(
            "ElabEWM", lambda: f"{by.kind} {by.var} with motive over {rl.describe(cctx)}"
        ):
            branches = L._elab_branches(
                cctx,
                self.el,
                res,
                list(by.clauses),
                lambda c2, cl, g: self._by_branch(c2, cl, g, depth),
                _data_clause_matcher,
            )
        assembled = res.assemble(branches)
        # the eliminated goal is label-typed; wrap it back into a description
        out = T.DCall(klabel, assembled)
        return "elim", L._inline_defs(cctx, ctx, out)

    def _by_branch(self, ctx: Context, cl: S.Clause, goal: Value, depth: int) -> Term:
        assert isinstance(goal, V.VDLabelTy)
        blabel = _elabel_from_value(goal.label, ctx)
        return self.elab_data_patts(ctx, (cl,), blabel, depth + 1)

    # one constructor: its tag and its argument telescope's code
    def elab_constructor(self, ctx: Context, ctor: S.CtorDecl, label: ELabel):
        if not T.valid_tag(ctor.name):
            raise ElabError("UnknownTag", ctor.span, f"invalid constructor name '{ctor.name}'")
        with self.tracer.node("ElabConstr", lambda: f"{ctor.name} under {label.describe(ctx)}"):
            code = self.elab_args(ctx, list(ctor.args), label)
        return ctor.name, code

    # the argument telescope: recursion-first, then exponentials, then fields
    def elab_args(self, ctx: Context, args: list, label: ELabel) -> Term:
        if not args:
            return self.elab_constraints(ctx, label)
        nm, tye = args[0]
        rest_args = args[1:]
        spine_head, spine_args = _espine(tye)
        # recursion matching, attempted first
        if isinstance(spine_head, S.EVar) and spine_head.name == label.head:
            with self.tracer.node(
                "ElabArg", lambda: f"({nm} : {S.print_expr(tye)}) recursive"
            ):
                is_tm = self.extract_indices(ctx, spine_args, label, tye)
                rest = self.elab_args(ctx, rest_args, label)
            return T.DTimes(T.DVarI(is_tm), rest)
        # exponentials whose codomain is recursive
        if isinstance(tye, S.EPi):
            doms, cod = _pi_spine(tye)
            cod_head, cod_args = _espine(cod)
            if isinstance(cod_head, S.EVar) and cod_head.name == label.head:
                with self.tracer.node(
                    "ElabArg", lambda: f"({nm} : {S.print_expr(tye)}) exponential"
                ):
                    inner_ctx = ctx
                    dom_terms = []
                    for dnm, dty in doms:
                        dt, dv, lvl = self.el.elab_type(inner_ctx, dty)
                        if lvl > 0:
                            raise ElabError(
                                "CheckMismatch", _sspan(dty), "argument domains must live in Set"
                            )
                        self._positivity(inner_ctx, dt, _sspan(dty))
                        dom_terms.append((dnm, dt))
                        inner_ctx = inner_ctx.extend(dnm, dv)
                    shifted_label = label.shift(len(dom_terms))
                    is_tm = self.extract_indices(inner_ctx, cod_args, shifted_label, cod)
                    code: Term = T.DVarI(is_tm)
                    for dnm, dt in reversed(dom_terms):
                        code = T.DPi(dt, T.Lam(dnm, dt, code))
                    rest = self.elab_args(ctx, rest_args, label)
                return T.DTimes(code, rest)
        # ordinary argument
        with self.tracer.node("ElabArg", lambda: f"({nm} : {S.print_expr(tye)})"):
            tyt, tyv, lvl = self.el.elab_type(ctx, tye)
            if lvl > 0:
                raise ElabError(
                    "CheckMismatch",
                    _sspan(tye),
                    "constructor arguments must live in Set",
                )
            self._positivity(ctx, tyt, _sspan(tye))
            rest = self.elab_args(ctx.extend(nm, tyv), rest_args, label.shift(1))
        out = T.DSigma(tyt, T.Lam(nm, tyt, rest))
        if self.instrument:
            K.check(ctx, out, V.VIDesc(label.index_type_value(ctx)))
        return out

    # trailing equality codes for the label's constraints
    def elab_constraints(self, ctx: Context, label: ELabel) -> Term:
        with self.tracer.node("ElabEqs", lambda: label.describe(ctx)):
            out = self._eqs(ctx, list(label.entries))
            if self.instrument:
                K.check(ctx, out, V.VIDesc(label.index_type_value(ctx)))
            return out

    def _eqs(self, ctx: Context, entries: list) -> Term:
        if not entries:
            return T.DOne()
        last = entries[-1]
        rest = entries[:-1]
        if not isinstance(last, EConstr):
            return self._eqs(ctx, rest)
        t = self.el.check(ctx, last.raw, ctx.eval(last.ty))
        self._positivity(ctx, t, _sspan(last.raw))
        inner = self._eqs(ctx, rest)
        return T.DSigma(
            T.Eq(last.ty, last.var, t),
            T.Lam("_", T.Eq(last.ty, last.var, t), T.shift(inner, 1)),
        )

    # indices of a recursive call, paired left to right
    def extract_indices(self, ctx: Context, spine_args: list, label: ELabel, at) -> Term:
        with self.tracer.node("ElabRecArgs", lambda: label.describe(ctx)):
            entries = list(label.entries)
            if len(spine_args) != len(entries):
                raise ElabError(
                    "PatternHeadMismatch",
                    _sspan(at),
                    f"recursive call applies {len(spine_args)} argument(s); "
                    f"the datatype takes {len(entries)}",
                )
            is_tm: Term = T.Void()
            for arg, entry in zip(spine_args, entries):
                tyv = ctx.eval(entry.ty)
                if isinstance(entry, EParam):
                    at_ = self.el.check(ctx, arg, tyv)
                    if not K.conv(ctx, ctx.eval(at_), ctx.eval(entry.tm)):
                        raise ElabError(
                            "PatternHeadMismatch",
                            _sspan(arg),
                            "parameters must be the same in recursive calls",
                        )
                else:
                    at_ = self.el.check(ctx, arg, tyv)
                    self._positivity(ctx, at_, _sspan(arg))
                    is_tm = T.Pair(is_tm, at_)
            if self.instrument:
                K.check(ctx, is_tm, label.index_type_value(ctx))
            return is_tm


def _data_clause_matcher(ctx, el, sg: L.EwmSubgoal, clause: S.Clause) -> bool:
    try:
        label = _elabel_from_value(sg.goal.label, ctx)
        validate_pattern(ctx, el, label, clause.head)
        return True
    except ElabError:
        return False


def _elabel_from_value(label: V.VDLabel, ctx: Context) -> ELabel:
    d = ctx.depth
    entries = []
    for e in label.entries:
        if isinstance(e, V.VLParam):
            entries.append(EParam(V.quote(e.tm, d), V.quote(e.ty, d)))
        elif isinstance(e, V.VLIndex):
            entries.append(EIndex(V.quote(e.tm, d), V.quote(e.ty, d)))
        else:
            raise ElabError("PatternHeadMismatch", None, "unexpected constraint in a by-goal")
    return ELabel(label.head, tuple(entries))


def _espine(e: S.ExtTerm):
    args = []
    while isinstance(e, S.EApp):
        args.append(e.arg)
        e = e.fn
    args.reverse()
    return e, args


def _pi_spine(e: S.ExtTerm):
    doms = []
    while isinstance(e, S.EPi):
        doms.append((e.name, e.dom))
        e = e.cod
    return doms, e


def _sspan(e) -> Optional[tuple]:
    return getattr(e, "span", None)


# --- whole declarations -----------------------------------------------------------


def elab_data(
    ctx: Context,
    decl: S.DataDecl,
    el: Optional[Elaborator] = None,
    trace: bool = False,
    instrument: bool = False,
) -> DataResult:
    el = el or Elaborator()
    tracer = Tracer(trace)
    if ctx.lookup(decl.name) is not None:
        raise ElabError("DuplicateName", decl.span, f"'{decl.name}' is already defined")

    with tracer.node("ElabData", lambda: decl.name):
        n0 = ctx.depth
        k = len(decl.params)
        m = len(decl.indices)

        # elaborate the telescope without the self binding
        p_tys: list = []
        inner = ctx
        for nm, tye in decl.params:
            tyt, tyv, lvl = el.elab_type(inner, tye)
            if lvl > 1:
                raise ElabError(
                    "CheckMismatch",
                    _sspan(tye),
                    "parameter types must live in Set or Set1",
                )
            p_tys.append(tyt)
            inner = inner.extend(nm, tyv)
        i_tys: list = []
        for pos, (nm, tye) in enumerate(decl.indices):
            tyt, tyv, lvl = el.elab_type(inner, tye)
            if lvl > 0:
                raise ElabError("CheckMismatch", _sspan(tye), "index types must live in Set")
            for earlier in range(pos):
                if T.occurs(tyt, earlier):
                    raise ElabError(
                        "CheckMismatch",
                        _sspan(tye),
                        "an index type may not depend on earlier indices",
                    )
            i_tys.append(tyt)
            inner = inner.extend(nm, tyv)

        # declared type and the opaque self binding
        d_ty: Term = T.Set_(0)
        for tyt in reversed([T.shift(t, 0) for t in i_tys]):
            d_ty = T.Pi("_", tyt, d_ty)
        for pos in reversed(range(k)):
            d_ty = T.Pi(decl.params[pos][0], p_tys[pos], d_ty)
        # name binders properly
        d_ty = _pi_rename(d_ty, [nm for nm, _ in decl.params] + [nm for nm, _ in decl.indices])
        d_ty_v = ctx.eval(d_ty)
        ctx_d = ctx.extend(decl.name, d_ty_v)

        # the opaque self binding sits between the outer context and the
        # telescope, so context references cross it while telescope-internal
        # references do not
        tel_ctx = ctx_d
        for pos, (nm, _) in enumerate(decl.params):
            tyv = tel_ctx.eval(T.shift(p_tys[pos], 1, cutoff=pos))
            tel_ctx = tel_ctx.extend(nm, tyv)
        for pos, (nm, _) in enumerate(decl.indices):
            tyv = tel_ctx.eval(T.shift(i_tys[pos], 1, cutoff=k + pos))
            tel_ctx = tel_ctx.extend(nm, tyv)

        entries = []
        for pos, (nm, _) in enumerate(decl.params):
            ix = (k - 1 - pos) + m
            ty_t = T.shift(T.shift(p_tys[pos], (k - pos) + m), 1, cutoff=k + m)
            entries.append(EParam(T.Var(ix), ty_t))
        for pos, (nm, _) in enumerate(decl.indices):
            ix = m - 1 - pos
            ty_t = T.shift(T.shift(i_tys[pos], m - pos), 1, cutoff=k + m)
            entries.append(EIndex(T.Var(ix), ty_t))
        label = ELabel(decl.name, tuple(entries))

        de = DataElab(el, n0, tracer, instrument=instrument)
        code = de.elab_data_patts(tel_ctx, decl.clauses, label)

        # collect constructor tags for the registry
        tags = _collect_tags(code)

        definiens = _build_definiens(ctx, decl, p_tys, i_tys, code, n0, k, m)
        return DataResult(
            name=decl.name,
            definiens=definiens,
            ty=d_ty,
            n_params=k,
            n_indices=m,
            code=code,
            tel_names=[decl.name] + [nm for nm, _ in decl.params] + [nm for nm, _ in decl.indices],
            tags=tags,
            trace=tracer.root,
        )


def _pi_rename(ty: Term, names: list) -> Term:
    if not names or not isinstance(ty, T.Pi):
        return ty
    return T.Pi(names[0], ty.dom, _pi_rename(ty.cod, names[1:]))


def _collect_tags(code: Term) -> list:
    if isinstance(code, T.DRet) and isinstance(code.enum, (T.ConsE, T.NilE)):
        tags = []
        e = code.enum
        while isinstance(e, T.ConsE):
            if isinstance(e.tag, T.Tag):
                tags.append(e.tag.name)
            e = e.rest
        return tags
    return []


def _strengthen(t: Term, by: int, what: str) -> Term:
    """Shift down by `by`, requiring that the dropped range is unused."""
    for j in range(by):
        if T.occurs(t, j):
            raise ElabError("CheckMismatch", None, f"{what} may not depend on local binders")
    return T.map_vars(t, lambda i, d: T.Var(i - by))


def _build_definiens(ctx, decl, p_tys, i_tys, code, n0: int, k: int, m: int) -> Term:
    # index tuple type at depth n0+k (below the index binders)
    idx_ty: Term = T.Unit()
    for pos, tyt in enumerate(i_tys):
        base = _strengthen(tyt, pos, "an index type")
        idx_ty = T.Sigma("_", idx_ty, T.shift(base, 1))

    # code lives at [ctx, D, params, indices]; move it to [ctx, params, j]
    def remap(old: int) -> Term:
        if old < m:
            t: Term = T.Var(0)
            for _ in range(old):
                t = T.Fst(t)
            return T.Snd(t)
        if old < m + k:
            return T.Var(old - m + 1)
        if old == m + k:
            raise ElabError(
                "NonPositive", decl.span, "recursive occurrence survived into the code"
            )
        return T.Var(old - m)

    code_r = T.subst_free(code, remap)

    # the label under R: D <p...> [proj j]...
    entries = []
    for pos in range(k):
        entries.append(
            T.LParam(T.Var(k - pos), T.shift(p_tys[pos], k + 1 - pos))
        )
    for pos in range(m):
        proj: Term = T.Var(0)
        for _ in range(m - 1 - pos):
            proj = T.Fst(proj)
        proj = T.Snd(proj)
        base = _strengthen(i_tys[pos], pos, "an index type")
        entries.append(T.LIndex(proj, T.shift(base, 1)))
    label_r = T.DLabel(decl.name, tuple(entries))

    r_term = T.Lam("j", idx_ty, T.DCall(label_r, code_r))

    # pack the index variables into the tuple
    pack: Term = T.Void()
    for pos in range(m):
        pack = T.Pair(pack, T.Var(m - 1 - pos))

    body = T.IMu(T.shift(idx_ty, m), T.shift(r_term, m), pack)
    out = body
    for pos in reversed(range(m)):
        out = T.Lam(decl.indices[pos][0], i_tys[pos], out)
    for pos in reversed(range(k)):
        out = T.Lam(decl.params[pos][0], p_tys[pos], out)
    return out
