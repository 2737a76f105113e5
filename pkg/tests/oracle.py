"""Brute-force reference semantics, independent of ``eventua.evaluator``.

Bound variables are eliminated by substituting constants before anything is
evaluated, so this code never carries an environment.  Values are plain
Python: an individual is its name, a pair is a ``("pair", l, r)`` tuple and
``None`` is the undefined object.
"""

from eventua import syntax as s

UNDEF = None


class OracleError(Exception):
    pass


def _plug(node, var, name):
    """Replace free occurrences of ``var`` with the constant ``#name``."""
    if isinstance(node, s.Var):
        return s.Const(name) if node.name == var else node
    if isinstance(node, (s.Const, s.FnRef)):
        return node
    if isinstance(node, s.Pair):
        return s.Pair(_plug(node.left, var, name), _plug(node.right, var, name))
    if isinstance(node, s.App):
        return s.App(_plug(node.fn, var, name), _plug(node.arg, var, name))
    if isinstance(node, s.Restrict):
        return s.Restrict(_plug(node.term, var, name), _plug(node.guard, var, name))
    if isinstance(node, s.Pred):
        return s.Pred(node.name, tuple(_plug(a, var, name) for a in node.args))
    if isinstance(node, s.Eq):
        return s.Eq(_plug(node.left, var, name), _plug(node.right, var, name))
    if isinstance(node, s.Cmp):
        return s.Cmp(node.op, _plug(node.left, var, name), _plug(node.right, var, name))
    if isinstance(node, s.Exist):
        return s.Exist(_plug(node.term, var, name))
    if isinstance(node, s.Not):
        return s.Not(_plug(node.body, var, name))
    if isinstance(node, (s.And, s.Or)):
        return type(node)(_plug(node.left, var, name), _plug(node.right, var, name))
    if isinstance(node, (s.ForallH, s.ForallU, s.ExistsH, s.ExistsU, s.Iota, s.IotaActual)):
        if node.var == var:
            return node
        return type(node)(node.var, _plug(node.body, var, name))
    raise OracleError(f"unexpected node {node!r}")


class Oracle:
    def __init__(self, world):
        self.v = {ind.name for ind in world.individuals}
        self.h = sorted(world.potential)
        self.u = {e: sorted(world.actual[e]) for e in world.events}
        self.pay = {ind.name: ind.payload for ind in world.individuals}
        self.rel = {}
        for r in world.relations.values():
            if r.kind == "extensional":
                self.rel[r.name] = (r.arity, {e: set(r.tuples) for e in world.events})
            else:
                self.rel[r.name] = (r.arity, {e: set(r.by_event.get(e, ())) for e in world.events})
        self.fn = {}
        for f in world.functions.values():
            self.fn[f.name] = {e: dict(f.graph if f.kind == "extensional" else f.by_event[e])
                               for e in world.events}

    # terms

    def den(self, t, i):
        if isinstance(t, s.Const):
            if t.name not in self.v:
                raise OracleError("unknown constant")
            return t.name
        if isinstance(t, s.Var):
            raise OracleError(f"free variable {t.name}")
        if isinstance(t, s.Pair):
            a, b = self.den(t.left, i), self.den(t.right, i)
            return UNDEF if a is UNDEF or b is UNDEF else ("pair", a, b)
        if isinstance(t, s.App):
            a = self.den(t.arg, i)
            if a is UNDEF:
                return UNDEF
            return self.fn[t.fn.name][i][a]
        if isinstance(t, (s.Iota, s.IotaActual)):
            pool = self.h if isinstance(t, s.Iota) else self.u[i]
            hits = [c for c in pool if self.sat(_plug(t.body, t.var, c), i)]
            return hits[0] if len(hits) == 1 else UNDEF
        if isinstance(t, s.Restrict):
            a = self.den(t.term, i)
            ok = self.sat(t.guard, i)
            return a if ok and a is not UNDEF else UNDEF
        raise OracleError(f"unexpected term {t!r}")

    # formulas

    def sat(self, f, i):
        if isinstance(f, s.Pred):
            arity, ext = self.rel[f.name]
            vals = [self.den(a, i) for a in f.args]
            if len(vals) != arity:
                raise OracleError("arity")
            if any(not isinstance(v, str) for v in vals):
                return False
            return tuple(vals) in ext[i]
        if isinstance(f, s.Eq):
            a, b = self.den(f.left, i), self.den(f.right, i)
            return a is not UNDEF and b is not UNDEF and a == b
        if isinstance(f, s.Cmp):
            a, b = self.den(f.left, i), self.den(f.right, i)
            if a is UNDEF or b is UNDEF:
                return False
            sym = f.op.symbol
            if sym == "!=":
                return a != b
            x, y = self.pay.get(a) if isinstance(a, str) else None, self.pay.get(b) if isinstance(b, str) else None
            if x is None or y is None:
                raise OracleError("non-numeric")
            return {"<": x < y, ">": x > y, "<=": x <= y, ">=": x >= y}[sym]
        if isinstance(f, s.Exist):
            a = self.den(f.term, i)
            return isinstance(a, str) and a in self.h
        if isinstance(f, s.Not):
            return not self.sat(f.body, i)
        if isinstance(f, s.And):
            left = self.sat(f.left, i)
            right = self.sat(f.right, i)
            return left and right
        if isinstance(f, s.Or):
            left = self.sat(f.left, i)
            right = self.sat(f.right, i)
            return left or right
        if isinstance(f, s.ForallH):
            return all([self.sat(_plug(f.body, f.var, c), i) for c in self.h])
        if isinstance(f, s.ExistsH):
            return any([self.sat(_plug(f.body, f.var, c), i) for c in self.h])
        if isinstance(f, s.ForallU):
            return all([self.sat(_plug(f.body, f.var, c), i) for c in self.u[i]])
        if isinstance(f, s.ExistsU):
            return any([self.sat(_plug(f.body, f.var, c), i) for c in self.u[i]])
        raise OracleError(f"unexpected formula {f!r}")


def to_oracle_value(v):
    """Translate an ``eventua`` value into the oracle's representation."""
    from eventua.evaluator import PairV

    if isinstance(v, PairV):
        return ("pair", to_oracle_value(v.left), to_oracle_value(v.right))
    return v
