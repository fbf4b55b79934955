"""Maximum-weight matching on general graphs (the O(n^3) blossom
algorithm, flat-array formulation).

Runs in maximum-cardinality mode, which is what minimum-weight perfect
matching reductions need: pass negated integer costs and every matchable
vertex gets matched while the total cost is minimized.  Integer weights
keep all dual variables integral, so termination is exact.

Compiled with numba when available; the same code runs unmodified (slower)
in plain Python.
"""

from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly
    from numba import njit

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True, inline="always")
def _slack(k, eu, ev, ew, dualvar):
    return dualvar[eu[k]] + dualvar[ev[k]] - 2 * ew[k]


@njit(cache=True)
def _blossom_leaves(b, nv, bc_child, bc_len, leaf_buf, leaf_stack):
    n_leaves = 0
    top = 0
    leaf_stack[top] = b
    top += 1
    while top > 0:
        top -= 1
        t = leaf_stack[top]
        if t < nv:
            leaf_buf[n_leaves] = t
            n_leaves += 1
        else:
            for ci in range(bc_len[t]):
                leaf_stack[top] = bc_child[t, ci]
                top += 1
    return n_leaves


@njit(cache=True)
def _assign_label(w0, t0, p0, nv, endpoint, mate, label, labelend, inblossom,
                  blossombase, bestedge, bc_child, bc_len, queue, qstate,
                  leaf_buf, leaf_stack):
    w, t, p = w0, t0, p0
    while True:
        b = inblossom[w]
        label[w] = t
        label[b] = t
        labelend[w] = p
        labelend[b] = p
        bestedge[w] = -1
        bestedge[b] = -1
        if t == 1:
            cnt = _blossom_leaves(b, nv, bc_child, bc_len, leaf_buf, leaf_stack)
            if qstate[1] + cnt > len(queue):
                raise RuntimeError("matching queue overflow")
            for li in range(cnt):
                queue[qstate[1]] = leaf_buf[li]
                qstate[1] += 1
            return
        base = blossombase[b]
        w, t, p = endpoint[mate[base]], 1, mate[base] ^ 1


@njit(cache=True)
def _scan_blossom(v0, w0, nv, endpoint, label, labelend, inblossom, blossombase):
    path = np.empty(2 * nv, dtype=np.int64)
    n_path = 0
    base = -1
    v = v0
    w = w0
    while v != -1 or w != -1:
        b = inblossom[v]
        if label[b] & 4:
            base = blossombase[b]
            break
        path[n_path] = b
        n_path += 1
        label[b] |= 4
        if labelend[b] == -1:
            v = -1
        else:
            v = endpoint[labelend[b]]
            b = inblossom[v]
            v = endpoint[labelend[b]]
        if w != -1:
            v, w = w, v
    for i in range(n_path):
        label[path[i]] &= ~4
    return base


@njit(cache=True)
def _add_blossom(base, k, nv, eu, ev, ew, endpoint, nbstart, nbdata, mate,
                 label, labelend, inblossom, blossomparent, blossombase,
                 bestedge, dualvar, bc_child, bc_endp, bc_len, be_list, be_len,
                 unused, ustate, queue, qstate, leaf_buf, leaf_stack):
    v = eu[k]
    w = ev[k]
    bb = inblossom[base]
    bv = inblossom[v]
    bw = inblossom[w]
    ustate[0] -= 1
    b = unused[ustate[0]]
    blossombase[b] = base
    blossomparent[b] = -1
    blossomparent[bb] = b

    path = np.empty(2 * nv, dtype=np.int64)
    endps = np.empty(2 * nv, dtype=np.int64)
    n1 = 0
    while bv != bb:
        blossomparent[bv] = b
        path[n1] = bv
        endps[n1] = labelend[bv]
        n1 += 1
        v = endpoint[labelend[bv]]
        bv = inblossom[v]
    bc_child[b, 0] = bb
    for i in range(n1):
        bc_child[b, 1 + i] = path[n1 - 1 - i]
        bc_endp[b, i] = endps[n1 - 1 - i]
    bc_endp[b, n1] = 2 * k
    total = n1 + 1
    nw = 0
    while bw != bb:
        blossomparent[bw] = b
        bc_child[b, total + nw] = bw
        bc_endp[b, total + nw] = labelend[bw] ^ 1
        nw += 1
        w = endpoint[labelend[bw]]
        bw = inblossom[w]
    bc_len[b] = total + nw

    label[b] = 1
    labelend[b] = labelend[bb]
    dualvar[b] = 0
    cnt = _blossom_leaves(b, nv, bc_child, bc_len, leaf_buf, leaf_stack)
    for li in range(cnt):
        u = leaf_buf[li]
        if label[inblossom[u]] == 2:
            queue[qstate[1]] = u
            qstate[1] += 1
        inblossom[u] = b

    bestedgeto = -np.ones(2 * nv, dtype=np.int64)
    for ci in range(bc_len[b]):
        bvx = bc_child[b, ci]
        scan_leaves = bvx < nv or be_len[bvx] == 0
        if scan_leaves:
            cnt2 = _blossom_leaves(bvx, nv, bc_child, bc_len, leaf_buf, leaf_stack)
            for li in range(cnt2):
                x = leaf_buf[li]
                for pi in range(nbstart[x], nbstart[x + 1]):
                    p = nbdata[pi]
                    kk = p // 2
                    j = endpoint[p]
                    bj = inblossom[j]
                    if bj != b and label[bj] == 1 and (
                        bestedgeto[bj] == -1
                        or _slack(kk, eu, ev, ew, dualvar) < _slack(bestedgeto[bj], eu, ev, ew, dualvar)
                    ):
                        bestedgeto[bj] = kk
        else:
            for li in range(be_len[bvx]):
                kk = be_list[bvx, li]
                i2 = eu[kk]
                j2 = ev[kk]
                bj = inblossom[j2]
                if bj == b:
                    bj = inblossom[i2]
                if bj != b and label[bj] == 1 and (
                    bestedgeto[bj] == -1
                    or _slack(kk, eu, ev, ew, dualvar) < _slack(bestedgeto[bj], eu, ev, ew, dualvar)
                ):
                    bestedgeto[bj] = kk
        be_len[bvx] = 0
        bestedge[bvx] = -1
    n_be = 0
    for bj in range(2 * nv):
        if bestedgeto[bj] != -1:
            be_list[b, n_be] = bestedgeto[bj]
            n_be += 1
    be_len[b] = n_be
    bestedge[b] = -1
    for li in range(n_be):
        kk = be_list[b, li]
        if bestedge[b] == -1 or _slack(kk, eu, ev, ew, dualvar) < _slack(bestedge[b], eu, ev, ew, dualvar):
            bestedge[b] = kk


@njit(cache=True)
def _expand_blossom(b0, endstage, nv, endpoint, mate, label, labelend,
                    inblossom, blossomparent, blossombase, bestedge, dualvar,
                    bc_child, bc_endp, bc_len, be_list, be_len, allowedge,
                    unused, ustate, queue, qstate, leaf_buf, leaf_stack):
    work = np.empty(2 * nv, dtype=np.int64)
    n_work = 0
    work[n_work] = b0
    n_work += 1
    while n_work > 0:
        n_work -= 1
        b = work[n_work]
        for ci in range(bc_len[b]):
            s = bc_child[b, ci]
            blossomparent[s] = -1
            if s < nv:
                inblossom[s] = s
            elif endstage and dualvar[s] == 0:
                work[n_work] = s
                n_work += 1
            else:
                cnt = _blossom_leaves(s, nv, bc_child, bc_len, leaf_buf, leaf_stack)
                for li in range(cnt):
                    inblossom[leaf_buf[li]] = s
        if (not endstage) and label[b] == 2:
            L = bc_len[b]
            entrychild = inblossom[endpoint[labelend[b] ^ 1]]
            jx = 0
            for ci in range(L):
                if bc_child[b, ci] == entrychild:
                    jx = ci
                    break
            if jx & 1:
                jstep = 1
                endptrick = 0
                jx -= L
            else:
                jstep = -1
                endptrick = 1
            p = labelend[b]
            while jx != 0:
                label[endpoint[p ^ 1]] = 0
                label[endpoint[bc_endp[b, (jx - endptrick) % L] ^ endptrick ^ 1]] = 0
                _assign_label(endpoint[p ^ 1], 2, p, nv, endpoint, mate, label,
                              labelend, inblossom, blossombase, bestedge,
                              bc_child, bc_len, queue, qstate, leaf_buf, leaf_stack)
                allowedge[bc_endp[b, (jx - endptrick) % L] // 2] = True
                jx += jstep
                p = bc_endp[b, (jx - endptrick) % L] ^ endptrick
                allowedge[p // 2] = True
                jx += jstep
            bv = bc_child[b, jx % L]
            label[endpoint[p ^ 1]] = 2
            label[bv] = 2
            labelend[endpoint[p ^ 1]] = p
            labelend[bv] = p
            bestedge[bv] = -1
            jx += jstep
            while bc_child[b, jx % L] != entrychild:
                bvx = bc_child[b, jx % L]
                if label[bvx] == 1:
                    jx += jstep
                    continue
                cnt = _blossom_leaves(bvx, nv, bc_child, bc_len, leaf_buf, leaf_stack)
                vx = -1
                for li in range(cnt):
                    if label[leaf_buf[li]] != 0:
                        vx = leaf_buf[li]
                        break
                if vx != -1:
                    label[vx] = 0
                    label[endpoint[mate[blossombase[bvx]]]] = 0
                    _assign_label(vx, 2, labelend[vx], nv, endpoint, mate, label,
                                  labelend, inblossom, blossombase, bestedge,
                                  bc_child, bc_len, queue, qstate, leaf_buf, leaf_stack)
                jx += jstep
        label[b] = -1
        labelend[b] = -1
        bc_len[b] = 0
        blossombase[b] = -1
        bestedge[b] = -1
        be_len[b] = 0
        unused[ustate[0]] = b
        ustate[0] += 1


@njit(cache=True)
def _augment_blossom(b0, v0, nv, endpoint, mate, blossomparent, blossombase,
                     bc_child, bc_endp, bc_len):
    stack_b = np.empty(4 * nv, dtype=np.int64)
    stack_v = np.empty(4 * nv, dtype=np.int64)
    n_stack = 0
    stack_b[n_stack] = b0
    stack_v[n_stack] = v0
    n_stack += 1
    tmp_c = np.empty(bc_child.shape[1], dtype=np.int64)
    tmp_e = np.empty(bc_child.shape[1], dtype=np.int64)
    while n_stack > 0:
        n_stack -= 1
        b = stack_b[n_stack]
        v = stack_v[n_stack]
        t = v
        while blossomparent[t] != b:
            t = blossomparent[t]
        if t >= nv:
            stack_b[n_stack] = t
            stack_v[n_stack] = v
            n_stack += 1
        L = bc_len[b]
        i0 = 0
        for ci in range(L):
            if bc_child[b, ci] == t:
                i0 = ci
                break
        jx = i0
        if i0 & 1:
            jstep = 1
            endptrick = 0
            jx -= L
        else:
            jstep = -1
            endptrick = 1
        while jx != 0:
            jx += jstep
            tchild = bc_child[b, jx % L]
            p = bc_endp[b, (jx - endptrick) % L] ^ endptrick
            if tchild >= nv:
                stack_b[n_stack] = tchild
                stack_v[n_stack] = endpoint[p]
                n_stack += 1
            jx += jstep
            tchild2 = bc_child[b, jx % L]
            if tchild2 >= nv:
                stack_b[n_stack] = tchild2
                stack_v[n_stack] = endpoint[p ^ 1]
                n_stack += 1
            mate[endpoint[p]] = p ^ 1
            mate[endpoint[p ^ 1]] = p
        if i0 > 0:
            for ci in range(L):
                tmp_c[ci] = bc_child[b, (i0 + ci) % L]
                tmp_e[ci] = bc_endp[b, (i0 + ci) % L]
            for ci in range(L):
                bc_child[b, ci] = tmp_c[ci]
                bc_endp[b, ci] = tmp_e[ci]
        # Deferred sub-blossom augments have not updated their bases yet;
        # after the full augment the base of b is the exposed vertex v.
        blossombase[b] = blossombase[v]


@njit(cache=True)
def _augment_matching(k, nv, eu, ev, endpoint, mate, label, labelend,
                      inblossom, blossomparent, blossombase, bc_child, bc_endp, bc_len):
    for side in range(2):
        if side == 0:
            s = eu[k]
            p = 2 * k + 1
        else:
            s = ev[k]
            p = 2 * k
        while True:
            bs = inblossom[s]
            if bs >= nv:
                _augment_blossom(bs, s, nv, endpoint, mate, blossomparent,
                                 blossombase, bc_child, bc_endp, bc_len)
            mate[s] = p
            if labelend[bs] == -1:
                break
            t = endpoint[labelend[bs]]
            bt = inblossom[t]
            s_next = endpoint[labelend[bt]]
            j = endpoint[labelend[bt] ^ 1]
            if bt >= nv:
                _augment_blossom(bt, j, nv, endpoint, mate, blossomparent,
                                 blossombase, bc_child, bc_endp, bc_len)
            mate[j] = labelend[bt]
            p = labelend[bt] ^ 1
            s = s_next


@njit(cache=True)
def _kernel(eu, ev, ew, nv):  # noqa: C901
    ne = len(eu)
    mate = -np.ones(nv, dtype=np.int64)
    if nv == 0 or ne == 0:
        return mate
    maxw = ew[0]
    for k in range(ne):
        if ew[k] > maxw:
            maxw = ew[k]
    if maxw < 0:
        maxw = 0

    endpoint = np.empty(2 * ne, dtype=np.int64)
    for k in range(ne):
        endpoint[2 * k] = eu[k]
        endpoint[2 * k + 1] = ev[k]
    deg = np.zeros(nv, dtype=np.int64)
    for k in range(ne):
        deg[eu[k]] += 1
        deg[ev[k]] += 1
    nbstart = np.zeros(nv + 1, dtype=np.int64)
    for i in range(nv):
        nbstart[i + 1] = nbstart[i] + deg[i]
    fill = nbstart[:nv].copy()
    nbdata = np.empty(2 * ne, dtype=np.int64)
    for k in range(ne):
        i = eu[k]
        j = ev[k]
        nbdata[fill[i]] = 2 * k + 1
        fill[i] += 1
        nbdata[fill[j]] = 2 * k
        fill[j] += 1

    label = np.zeros(2 * nv, dtype=np.int64)
    labelend = -np.ones(2 * nv, dtype=np.int64)
    inblossom = np.arange(nv, dtype=np.int64)
    blossomparent = -np.ones(2 * nv, dtype=np.int64)
    blossombase = np.empty(2 * nv, dtype=np.int64)
    for i in range(nv):
        blossombase[i] = i
    blossombase[nv:] = -1
    bestedge = -np.ones(2 * nv, dtype=np.int64)
    dualvar = np.empty(2 * nv, dtype=np.int64)
    dualvar[:nv] = maxw
    dualvar[nv:] = 0
    allowedge = np.zeros(ne, dtype=np.bool_)

    width = nv + 2
    bc_child = -np.ones((2 * nv, width), dtype=np.int64)
    bc_endp = -np.ones((2 * nv, width), dtype=np.int64)
    bc_len = np.zeros(2 * nv, dtype=np.int64)
    be_list = -np.ones((2 * nv, width), dtype=np.int64)
    be_len = np.zeros(2 * nv, dtype=np.int64)

    unused = np.empty(2 * nv, dtype=np.int64)
    for i in range(nv):
        unused[i] = nv + i
    ustate = np.zeros(1, dtype=np.int64)
    ustate[0] = nv

    queue = np.empty(64 * (nv + 1), dtype=np.int64)
    qstate = np.zeros(2, dtype=np.int64)  # head, tail
    leaf_buf = np.empty(nv, dtype=np.int64)
    leaf_stack = np.empty(2 * nv, dtype=np.int64)

    for _stage in range(nv):
        label[:] = 0
        bestedge[:] = -1
        be_len[:] = 0
        allowedge[:] = False
        qstate[0] = 0
        qstate[1] = 0
        for v in range(nv):
            if mate[v] == -1 and label[inblossom[v]] == 0:
                _assign_label(v, 1, -1, nv, endpoint, mate, label, labelend,
                              inblossom, blossombase, bestedge, bc_child,
                              bc_len, queue, qstate, leaf_buf, leaf_stack)
        augmented = False
        while True:
            while qstate[0] < qstate[1] and not augmented:
                v = queue[qstate[0]]
                qstate[0] += 1
                for pi in range(nbstart[v], nbstart[v + 1]):
                    p = nbdata[pi]
                    k = p // 2
                    w = endpoint[p]
                    if inblossom[v] == inblossom[w]:
                        continue
                    kslack = 0
                    if not allowedge[k]:
                        kslack = _slack(k, eu, ev, ew, dualvar)
                        if kslack <= 0:
                            allowedge[k] = True
                    if allowedge[k]:
                        if label[inblossom[w]] == 0:
                            _assign_label(w, 2, p ^ 1, nv, endpoint, mate, label,
                                          labelend, inblossom, blossombase,
                                          bestedge, bc_child, bc_len, queue,
                                          qstate, leaf_buf, leaf_stack)
                        elif label[inblossom[w]] == 1:
                            base = _scan_blossom(v, w, nv, endpoint, label,
                                                 labelend, inblossom, blossombase)
                            if base >= 0:
                                _add_blossom(base, k, nv, eu, ev, ew, endpoint,
                                             nbstart, nbdata, mate, label,
                                             labelend, inblossom, blossomparent,
                                             blossombase, bestedge, dualvar,
                                             bc_child, bc_endp, bc_len, be_list,
                                             be_len, unused, ustate, queue,
                                             qstate, leaf_buf, leaf_stack)
                            else:
                                _augment_matching(k, nv, eu, ev, endpoint, mate,
                                                  label, labelend, inblossom,
                                                  blossomparent, blossombase,
                                                  bc_child, bc_endp, bc_len)
                                augmented = True
                                break
                        elif label[w] == 0:
                            label[w] = 2
                            labelend[w] = p ^ 1
                    elif label[inblossom[w]] == 1:
                        b = inblossom[v]
                        if bestedge[b] == -1 or kslack < _slack(bestedge[b], eu, ev, ew, dualvar):
                            bestedge[b] = k
                    elif label[w] == 0:
                        if bestedge[w] == -1 or kslack < _slack(bestedge[w], eu, ev, ew, dualvar):
                            bestedge[w] = k
            if augmented:
                break
            deltatype = -1
            delta = 0
            deltaedge = -1
            deltablossom = -1
            for v in range(nv):
                if label[inblossom[v]] == 0 and bestedge[v] != -1:
                    d = _slack(bestedge[v], eu, ev, ew, dualvar)
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 2
                        deltaedge = bestedge[v]
            for b in range(2 * nv):
                if blossomparent[b] == -1 and label[b] == 1 and bestedge[b] != -1:
                    kslack = _slack(bestedge[b], eu, ev, ew, dualvar)
                    d = kslack // 2
                    if deltatype == -1 or d < delta:
                        delta = d
                        deltatype = 3
                        deltaedge = bestedge[b]
            for b in range(nv, 2 * nv):
                if (blossombase[b] >= 0 and blossomparent[b] == -1
                        and label[b] == 2
                        and (deltatype == -1 or dualvar[b] < delta)):
                    delta = dualvar[b]
                    deltatype = 4
                    deltablossom = b
            if deltatype == -1:
                break
            for v in range(nv):
                lb = label[inblossom[v]]
                if lb == 1:
                    dualvar[v] -= delta
                elif lb == 2:
                    dualvar[v] += delta
            for b in range(nv, 2 * nv):
                if blossombase[b] >= 0 and blossomparent[b] == -1:
                    if label[b] == 1:
                        dualvar[b] += delta
                    elif label[b] == 2:
                        dualvar[b] -= delta
            if deltatype == 2:
                allowedge[deltaedge] = True
                v = eu[deltaedge]
                if label[inblossom[v]] == 0:
                    v = ev[deltaedge]
                queue[qstate[1]] = v
                qstate[1] += 1
            elif deltatype == 3:
                allowedge[deltaedge] = True
                queue[qstate[1]] = eu[deltaedge]
                qstate[1] += 1
            else:
                _expand_blossom(deltablossom, False, nv, endpoint, mate, label,
                                labelend, inblossom, blossomparent, blossombase,
                                bestedge, dualvar, bc_child, bc_endp, bc_len,
                                be_list, be_len, allowedge, unused, ustate,
                                queue, qstate, leaf_buf, leaf_stack)
        if not augmented:
            break
        for b in range(nv, 2 * nv):
            if (blossombase[b] >= 0 and blossomparent[b] == -1
                    and label[b] == 1 and dualvar[b] == 0):
                _expand_blossom(b, True, nv, endpoint, mate, label, labelend,
                                inblossom, blossomparent, blossombase, bestedge,
                                dualvar, bc_child, bc_endp, bc_len, be_list,
                                be_len, allowedge, unused, ustate, queue,
                                qstate, leaf_buf, leaf_stack)
    return mate


def max_weight_matching(edge_u, edge_v, edge_w, nv) -> np.ndarray:
    """Maximum-cardinality maximum-weight matching.

    Returns mate[v] = partner vertex or -1.  Weights must be integral
    (int64); callers scale float costs beforehand.
    """
    eu = np.ascontiguousarray(edge_u, dtype=np.int64)
    ev = np.ascontiguousarray(edge_v, dtype=np.int64)
    ew = np.ascontiguousarray(edge_w, dtype=np.int64)
    mate_ep = _kernel(eu, ev, ew, int(nv))
    endpoint = np.empty(2 * len(eu), dtype=np.int64)
    endpoint[0::2] = eu
    endpoint[1::2] = ev
    mate = -np.ones(nv, dtype=np.int64)
    for v in range(nv):
        if mate_ep[v] >= 0:
            mate[v] = endpoint[mate_ep[v]]
    return mate
