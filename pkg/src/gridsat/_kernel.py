"""Compiled CDCL search kernel (numba).

All state lives in flat numpy arrays.  Literals are ``2*v`` / ``2*v + 1``.

Clauses sit in one int32 arena, each as a 3-word header followed by its
literals: ``[length, flags, learnt_slot, lit0, lit1, ...]`` where flags holds
bit 0 = learnt, bit 1 = deleted and the LBD in the remaining bits.  A clause
is referred to by the arena offset of its header (its "cref").

Watch lists share one pool of (cref, blocker) pairs, one segment per
literal; a full segment is moved to the end of the pool with twice the room.
Binary clauses are stored in the pool as ``~cref`` with the other literal as
blocker, so propagating them never touches the arena.
"""
from __future__ import annotations

import time

import numpy as np
from numba import njit, objmode

SAT, UNSAT, UNKNOWN = 10, 20, 0
HDR = 3
LEARNT, DELETED = 1, 2


@njit(cache=True)
def _luby(i):
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


@njit(cache=True, inline="always")
def _heap_up(heap, hpos, act, i):
    v = heap[i]
    a = act[v]
    while i > 0:
        p = (i - 1) >> 1
        pv = heap[p]
        if act[pv] >= a:
            break
        heap[i] = pv
        hpos[pv] = i
        i = p
    heap[i] = v
    hpos[v] = i


@njit(cache=True, inline="always")
def _heap_down(heap, hpos, act, hsize, i):
    v = heap[i]
    a = act[v]
    while True:
        c = 2 * i + 1
        if c >= hsize:
            break
        if c + 1 < hsize and act[heap[c + 1]] > act[heap[c]]:
            c += 1
        if act[heap[c]] <= a:
            break
        heap[i] = heap[c]
        hpos[heap[i]] = i
        i = c
    heap[i] = v
    hpos[v] = i


@njit(cache=True, inline="always")
def _heap_insert(heap, hpos, act, hs, v):
    heap[hs[0]] = v
    hpos[v] = hs[0]
    hs[0] += 1
    _heap_up(heap, hpos, act, hs[0] - 1)


@njit(cache=True, inline="always")
def _watch_push(lit, cr, blk, ws_start, ws_size, ws_cap, pool_c, pool_b, top):
    """Append a watch; the caller guarantees room for a relocation."""
    sz = ws_size[lit]
    if sz == ws_cap[lit]:
        newcap = 4 if sz == 0 else 2 * sz
        s = ws_start[lit]
        t = top[0]
        for k in range(sz):
            pool_c[t + k] = pool_c[s + k]
            pool_b[t + k] = pool_b[s + k]
        ws_start[lit] = t
        ws_cap[lit] = newcap
        top[0] += newcap
    p = ws_start[lit] + sz
    pool_c[p] = cr
    pool_b[p] = blk
    ws_size[lit] = sz + 1


@njit(cache=True)
def _rebuild_pool(n2, ws_start, ws_size, ws_cap, pool_c, pool_b, arena, fwd, top, spare):
    """Compact every watch segment, dropping deleted clauses, into arrays
    with at least ``spare`` free slots.

    With ``fwd`` set, live crefs are translated through the forwarding slot
    ``arena[cr + 2]`` left behind by garbage collection.
    """
    total = 0
    for lit in range(n2):
        total += max(4, 2 * ws_size[lit])
    size = max(total + spare, pool_c.shape[0])
    npc = np.empty(size, np.int32)
    npb = np.empty(size, np.int32)
    t = 0
    for lit in range(n2):
        s = ws_start[lit]
        live = 0
        for k in range(ws_size[lit]):
            cr = pool_c[s + k]
            base = cr if cr >= 0 else ~cr
            if arena[base + 1] & DELETED:
                continue
            if fwd:
                base = arena[base + 2]
                cr = base if cr >= 0 else ~base
            npc[t + live] = cr
            npb[t + live] = pool_b[s + k]
            live += 1
        ws_start[lit] = t
        ws_size[lit] = live
        ws_cap[lit] = max(4, 2 * live)
        t += ws_cap[lit]
    top[0] = t
    return npc, npb


@njit(cache=True)
def search(nvars, arena_in, cstart_in, clen_in, units, deadline, seed, max_conflicts):
    """Run CDCL to completion, timeout (``deadline`` on the monotonic clock,
    negative for none) or ``max_conflicts`` (negative for none).

    Returns ``(status, model, stats)`` where ``model[v]`` is 0/1 and
    ``stats = [decisions, conflicts, propagations, restarts]``.
    """
    n2 = 2 * (nvars + 1)
    value = np.zeros(n2, np.int8)
    level = np.zeros(nvars + 1, np.int32)
    reason = np.full(nvars + 1, -1, np.int32)
    trail = np.zeros(nvars + 1, np.int32)
    trail_lim = np.zeros(nvars + 1, np.int32)
    trail_size = 0
    nlevels = 0
    qhead = 0
    phase = np.ones(nvars + 1, np.int8)
    seen = np.zeros(nvars + 1, np.int8)
    toclear = np.zeros(nvars + 1, np.int32)
    stack = np.zeros(nvars + 1, np.int32)
    learnt = np.zeros(nvars + 1, np.int32)
    lvl_stamp = np.zeros(nvars + 2, np.int64)
    stamp = 0
    stats = np.zeros(4, np.int64)

    act = np.zeros(nvars + 1, np.float64)
    if seed != 0:
        np.random.seed(seed)
        for v in range(1, nvars + 1):
            act[v] = np.random.random() * 1e-5
    var_inc = 1.0
    heap = np.zeros(nvars + 1, np.int32)
    hpos = np.full(nvars + 1, -1, np.int32)
    hs = np.zeros(1, np.int64)
    for v in range(1, nvars + 1):
        _heap_insert(heap, hpos, act, hs, v)

    # clause arena
    ncl = cstart_in.shape[0]
    arena = np.zeros(max(64, 2 * (arena_in.shape[0] + HDR * ncl)), np.int32)
    atop = 0
    crefs = np.zeros(ncl, np.int32)
    for ci in range(ncl):
        ln = clen_in[ci]
        arena[atop] = ln
        cs = cstart_in[ci]
        for k in range(ln):
            arena[atop + HDR + k] = arena_in[cs + k]
        crefs[ci] = atop
        atop += HDR + ln
    garbage = 0

    # learnt clauses: slot -> cref and activity
    lrefs = np.zeros(1024, np.int32)
    lact = np.zeros(1024, np.float64)
    nlearnt = 0
    cla_inc = 1.0

    ws_start = np.zeros(n2, np.int64)
    ws_size = np.zeros(n2, np.int32)
    ws_cap = np.zeros(n2, np.int32)
    # every watch list may relocate while one literal is propagated; doubling
    # bounds the space this takes by 4 * (live watches + pushes)
    nwatch = 2 * ncl
    pool_c = np.zeros(8 * nwatch + 1024, np.int32)
    pool_b = np.zeros(8 * nwatch + 1024, np.int32)
    top = np.zeros(1, np.int64)
    for ci in range(ncl):
        cr = crefs[ci]
        a = arena[cr + HDR]
        b = arena[cr + HDR + 1]
        w = cr if arena[cr] > 2 else ~cr
        _watch_push(a, w, b, ws_start, ws_size, ws_cap, pool_c, pool_b, top)
        _watch_push(b, w, a, ws_start, ws_size, ws_cap, pool_c, pool_b, top)

    for k in range(units.shape[0]):
        lit = units[k]
        if value[lit] == -1:
            return UNSAT, np.zeros(nvars + 1, np.int8), stats
        if value[lit] == 0:
            value[lit] = 1
            value[lit ^ 1] = -1
            level[lit >> 1] = 0
            reason[lit >> 1] = -1
            trail[trail_size] = lit
            trail_size += 1

    restart_idx = 1
    conflict_budget = _luby(restart_idx) * 100
    conflicts_here = 0
    reduce_at = 2000
    nreduce = 0
    next_check = 8192
    props = 0

    while True:
        # ---- propagate ----
        confl = -1
        while qhead < trail_size:
            p = trail[qhead]
            qhead += 1
            props += 1
            fl = p ^ 1
            sz = ws_size[fl]
            if top[0] + 4 * (nwatch + sz) > pool_c.shape[0]:
                pool_c, pool_b = _rebuild_pool(n2, ws_start, ws_size, ws_cap, pool_c, pool_b,
                                               arena, False, top, 8 * (nwatch + sz) + 1024)
            s = ws_start[fl]
            i = 0
            j = 0
            while i < sz:
                cr = pool_c[s + i]
                blk = pool_b[s + i]
                i += 1
                vb = value[blk]
                if vb == 1:
                    pool_c[s + j] = cr
                    pool_b[s + j] = blk
                    j += 1
                    continue
                if cr < 0:
                    pool_c[s + j] = cr
                    pool_b[s + j] = blk
                    j += 1
                    if vb == -1:
                        confl = ~cr
                        break
                    value[blk] = 1
                    value[blk ^ 1] = -1
                    level[blk >> 1] = nlevels
                    reason[blk >> 1] = ~cr
                    trail[trail_size] = blk
                    trail_size += 1
                    continue
                cs = cr + HDR
                if arena[cs] == fl:
                    arena[cs] = arena[cs + 1]
                    arena[cs + 1] = fl
                first = arena[cs]
                if first != blk and value[first] == 1:
                    pool_c[s + j] = cr
                    pool_b[s + j] = first
                    j += 1
                    continue
                moved = False
                end = cs + arena[cr]
                for k in range(cs + 2, end):
                    lk = arena[k]
                    if value[lk] != -1:
                        arena[cs + 1] = lk
                        arena[k] = fl
                        _watch_push(lk, cr, first, ws_start, ws_size, ws_cap,
                                    pool_c, pool_b, top)
                        moved = True
                        break
                if moved:
                    continue
                pool_c[s + j] = cr
                pool_b[s + j] = first
                j += 1
                if value[first] == -1:
                    confl = cr
                    break
                value[first] = 1
                value[first ^ 1] = -1
                level[first >> 1] = nlevels
                reason[first >> 1] = cr
                trail[trail_size] = first
                trail_size += 1
            while i < sz:
                pool_c[s + j] = pool_c[s + i]
                pool_b[s + j] = pool_b[s + i]
                i += 1
                j += 1
            ws_size[fl] = j
            if confl != -1:
                qhead = trail_size
                break

        if confl != -1:
            stats[1] += 1
            conflicts_here += 1
            if nlevels == 0:
                stats[2] = props
                return UNSAT, np.zeros(nvars + 1, np.int8), stats
            if max_conflicts >= 0 and stats[1] > max_conflicts:
                stats[2] = props
                return UNKNOWN, np.zeros(nvars + 1, np.int8), stats
            # ---- analyze (first UIP) ----
            lsize = 1
            nt = 0
            pathc = 0
            pv = -1
            idx = trail_size - 1
            cr = confl
            while True:
                if arena[cr + 1] & LEARNT:
                    slot = arena[cr + 2]
                    lact[slot] += cla_inc
                    if lact[slot] > 1e20:
                        for k in range(nlearnt):
                            lact[k] *= 1e-20
                        cla_inc *= 1e-20
                cs = cr + HDR
                for k in range(cs, cs + arena[cr]):
                    q = arena[k]
                    v = q >> 1
                    if v == pv:
                        continue
                    if seen[v] == 0 and level[v] > 0:
                        seen[v] = 1
                        toclear[nt] = v
                        nt += 1
                        act[v] += var_inc
                        if act[v] > 1e100:
                            for u in range(1, nvars + 1):
                                act[u] *= 1e-100
                            var_inc *= 1e-100
                        if hpos[v] >= 0:
                            _heap_up(heap, hpos, act, hpos[v])
                        if level[v] >= nlevels:
                            pathc += 1
                        else:
                            learnt[lsize] = q
                            lsize += 1
                while seen[trail[idx] >> 1] == 0:
                    idx -= 1
                p = trail[idx]
                idx -= 1
                pv = p >> 1
                cr = reason[pv]
                seen[pv] = 0
                pathc -= 1
                if pathc <= 0:
                    break
            learnt[0] = p ^ 1
            # recursive minimisation: drop literals implied by the others
            if lsize > 1:
                abstract = 0
                for r in range(1, lsize):
                    abstract |= 1 << (level[learnt[r] >> 1] & 31)
                w = 1
                for r in range(1, lsize):
                    q = learnt[r]
                    if reason[q >> 1] == -1:
                        learnt[w] = q
                        w += 1
                        continue
                    sp = 0
                    stack[sp] = q
                    sp += 1
                    mark = nt
                    redundant = True
                    while sp > 0:
                        sp -= 1
                        x = stack[sp]
                        rc = reason[x >> 1]
                        for k in range(rc + HDR, rc + HDR + arena[rc]):
                            y = arena[k]
                            yv = y >> 1
                            if yv == (x >> 1) or seen[yv] != 0 or level[yv] == 0:
                                continue
                            if reason[yv] != -1 and (abstract >> (level[yv] & 31)) & 1:
                                seen[yv] = 1
                                stack[sp] = y
                                sp += 1
                                toclear[nt] = yv
                                nt += 1
                            else:
                                for z in range(mark, nt):
                                    seen[toclear[z]] = 0
                                nt = mark
                                redundant = False
                                sp = 0
                                break
                    if not redundant:
                        learnt[w] = q
                        w += 1
                lsize = w
            for k in range(nt):
                seen[toclear[k]] = 0
            back = 0
            if lsize > 1:
                best = 1
                for k in range(2, lsize):
                    if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                        best = k
                tmp = learnt[1]
                learnt[1] = learnt[best]
                learnt[best] = tmp
                back = level[learnt[1] >> 1]
            stamp += 1
            lbd = 0
            for k in range(lsize):
                lv = level[learnt[k] >> 1]
                if lvl_stamp[lv] != stamp:
                    lvl_stamp[lv] = stamp
                    lbd += 1
            # ---- backjump ----
            if nlevels > back:
                stop = trail_lim[back]
                for k in range(trail_size - 1, stop - 1, -1):
                    lit = trail[k]
                    v = lit >> 1
                    value[lit] = 0
                    value[lit ^ 1] = 0
                    phase[v] = lit & 1
                    reason[v] = -1
                    if hpos[v] < 0:
                        _heap_insert(heap, hpos, act, hs, v)
                trail_size = stop
                nlevels = back
                qhead = trail_size
            # ---- record learnt clause ----
            l0 = learnt[0]
            if lsize == 1:
                value[l0] = 1
                value[l0 ^ 1] = -1
                level[l0 >> 1] = 0
                reason[l0 >> 1] = -1
                trail[trail_size] = l0
                trail_size += 1
            else:
                if atop + HDR + lsize > arena.shape[0]:
                    na = np.zeros(2 * arena.shape[0] + HDR + lsize, np.int32)
                    na[:atop] = arena[:atop]
                    arena = na
                if nlearnt == lrefs.shape[0]:
                    nr = np.zeros(2 * nlearnt, np.int32)
                    nr[:nlearnt] = lrefs
                    lrefs = nr
                    nact = np.zeros(2 * nlearnt, np.float64)
                    nact[:nlearnt] = lact
                    lact = nact
                cr = atop
                arena[cr] = lsize
                arena[cr + 1] = (lbd << 2) | LEARNT
                arena[cr + 2] = nlearnt
                for k in range(lsize):
                    arena[cr + HDR + k] = learnt[k]
                atop += HDR + lsize
                lrefs[nlearnt] = cr
                lact[nlearnt] = cla_inc
                nlearnt += 1
                w = cr if lsize > 2 else ~cr
                if top[0] + 4 * (nwatch + 2) > pool_c.shape[0]:
                    pool_c, pool_b = _rebuild_pool(n2, ws_start, ws_size, ws_cap, pool_c, pool_b,
                                                   arena, False, top, 8 * nwatch + 1024)
                _watch_push(l0, w, learnt[1], ws_start, ws_size, ws_cap, pool_c, pool_b, top)
                _watch_push(learnt[1], w, l0, ws_start, ws_size, ws_cap, pool_c, pool_b, top)
                nwatch += 2
                value[l0] = 1
                value[l0 ^ 1] = -1
                level[l0 >> 1] = nlevels
                reason[l0 >> 1] = cr
                trail[trail_size] = l0
                trail_size += 1
            var_inc /= 0.95
            cla_inc /= 0.999
            continue

        # ---- no conflict ----
        if deadline >= 0.0 and props >= next_check:
            next_check = props + 8192
            with objmode(now="float64"):
                now = time.monotonic()
            if now > deadline:
                stats[2] = props
                return UNKNOWN, np.zeros(nvars + 1, np.int8), stats
        if conflicts_here >= conflict_budget:
            stats[3] += 1
            restart_idx += 1
            conflict_budget = _luby(restart_idx) * 100
            conflicts_here = 0
            if nlevels > 0:
                stop = trail_lim[0]
                for k in range(trail_size - 1, stop - 1, -1):
                    lit = trail[k]
                    v = lit >> 1
                    value[lit] = 0
                    value[lit ^ 1] = 0
                    phase[v] = lit & 1
                    reason[v] = -1
                    if hpos[v] < 0:
                        _heap_insert(heap, hpos, act, hs, v)
                trail_size = stop
                nlevels = 0
                qhead = trail_size
        if stats[1] >= reduce_at:
            # ---- reduce learnt clause database ----
            cand = np.zeros(nlearnt, np.int64)
            nc = 0
            maxact = 1e-300
            for sl in range(nlearnt):
                cr = lrefs[sl]
                if arena[cr] <= 2 or (arena[cr + 1] >> 2) <= 2:
                    continue
                first = arena[cr + HDR]
                if value[first] == 1 and reason[first >> 1] == cr:
                    continue
                cand[nc] = sl
                nc += 1
                if lact[sl] > maxact:
                    maxact = lact[sl]
            key = np.zeros(nc, np.float64)
            for k in range(nc):
                sl = cand[k]
                key[k] = -(arena[lrefs[sl] + 1] >> 2) + lact[sl] / maxact
            order = np.argsort(key)
            for k in range(nc // 2):
                cr = lrefs[cand[order[k]]]
                arena[cr + 1] |= DELETED
                garbage += HDR + arena[cr]
            fwd = garbage * 2 > atop
            na = arena
            t = atop
            if fwd:
                # copy live clauses to a fresh arena, leaving forwarding crefs
                na = np.zeros(arena.shape[0], np.int32)
                t = 0
                c = 0
                while c < atop:
                    ln = arena[c]
                    if (arena[c + 1] & DELETED) == 0:
                        for k in range(HDR + ln):
                            na[t + k] = arena[c + k]
                        arena[c + 2] = t
                        t += HDR + ln
                    c += HDR + ln
                for v in range(1, nvars + 1):
                    if reason[v] >= 0:
                        reason[v] = arena[reason[v] + 2]
            pool_c, pool_b = _rebuild_pool(n2, ws_start, ws_size, ws_cap, pool_c, pool_b,
                                           arena, fwd, top, 8 * nwatch + 1024)
            nwatch = 0
            for lit in range(n2):
                nwatch += ws_size[lit]
            nl = 0
            if fwd:
                arena = na
                atop = t
                garbage = 0
                c = 0
                while c < atop:
                    if arena[c + 1] & LEARNT:
                        slot = arena[c + 2]
                        lact[nl] = lact[slot]
                        lrefs[nl] = c
                        arena[c + 2] = nl
                        nl += 1
                    c += HDR + arena[c]
            else:
                for sl in range(nlearnt):
                    cr = lrefs[sl]
                    if (arena[cr + 1] & DELETED) == 0:
                        lact[nl] = lact[sl]
                        lrefs[nl] = cr
                        arena[cr + 2] = nl
                        nl += 1
            nlearnt = nl
            nreduce += 1
            reduce_at = stats[1] + 2000 + 300 * nreduce
        # ---- decide ----
        nxt = -1
        while hs[0] > 0:
            v = heap[0]
            hs[0] -= 1
            hpos[v] = -1
            if hs[0] > 0:
                heap[0] = heap[hs[0]]
                hpos[heap[0]] = 0
                _heap_down(heap, hpos, act, hs[0], 0)
            if value[2 * v] == 0:
                nxt = v
                break
        if nxt == -1:
            stats[2] = props
            model = np.zeros(nvars + 1, np.int8)
            for v in range(1, nvars + 1):
                model[v] = 1 if value[2 * v] == 1 else 0
            return SAT, model, stats
        stats[0] += 1
        trail_lim[nlevels] = trail_size
        nlevels += 1
        lit = 2 * nxt + phase[nxt]
        value[lit] = 1
        value[lit ^ 1] = -1
        level[nxt] = nlevels
        reason[nxt] = -1
        trail[trail_size] = lit
        trail_size += 1


def prepare(num_vars: int, clauses):
    """Flatten clauses into kernel inputs.

    Returns ``(arena, starts, lengths, units, trivially_unsat)``; tautologies
    and duplicate literals are removed, unit clauses split off.
    """
    arena: list[int] = []
    starts: list[int] = []
    lengths: list[int] = []
    units: list[int] = []
    for raw in clauses:
        lits = set()
        taut = False
        for x in raw:
            lit = 2 * x if x > 0 else -2 * x + 1
            if lit ^ 1 in lits:
                taut = True
                break
            lits.add(lit)
        if taut:
            continue
        if not lits:
            return None, None, None, None, True
        if len(lits) == 1:
            units.append(next(iter(lits)))
            continue
        starts.append(len(arena))
        lengths.append(len(lits))
        arena.extend(sorted(lits))
    return (np.asarray(arena, np.int32), np.asarray(starts, np.int64),
            np.asarray(lengths, np.int32), np.asarray(units, np.int32), False)
