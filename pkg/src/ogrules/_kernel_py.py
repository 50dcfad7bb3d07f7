"""Pure-Python backtracking embedding search.

Same signature and semantics as the compiled ``_kernel`` module; used when the
extension is not built or ``OGRULES_PURE_PYTHON`` is set.
"""
import time

_CHECK_EVERY = 1 << 14


def embeddings(order, parent, p_label, p_deg, p_ptr, p_idx, p_elab, f_ptr, f_idx,
               h_label, h_deg, h_ptr, h_idx, h_mat, limit=0, deadline=0.0):
    n_p = len(order)
    n_h = len(h_label)
    if n_p == 0:
        return [()]
    order = list(order)
    parent = list(parent)
    p_label = list(p_label)
    p_deg = list(p_deg)
    h_label = list(h_label)
    h_deg = list(h_deg)
    h_idx = list(h_idx)
    h_ptr = list(h_ptr)
    h_mat = list(h_mat)
    # per pattern node: [(neighbour, edge label + 1)], [forbidden partner]
    p_adj = [[(int(p_idx[j]), int(p_elab[j]) + 1) for j in range(p_ptr[u], p_ptr[u + 1])]
             for u in range(n_p)]
    p_forb = [[int(f_idx[j]) for j in range(f_ptr[u], f_ptr[u + 1])] for u in range(n_p)]

    img = [-1] * n_p
    used = [False] * n_h
    cursor = [0] * n_p
    end = [0] * n_p
    out = []
    checks = 0

    def enter(k):
        par = parent[k]
        if par >= 0:
            hp = img[par]
            cursor[k] = h_ptr[hp]
            end[k] = h_ptr[hp + 1]
        else:
            cursor[k] = 0
            end[k] = n_h

    enter(0)
    k = 0
    while k >= 0:
        u = order[k]
        if img[u] >= 0:
            used[img[u]] = False
            img[u] = -1
        found = -1
        via_parent = parent[k] >= 0
        lab = p_label[u]
        deg = p_deg[u]
        while cursor[k] < end[k]:
            h = h_idx[cursor[k]] if via_parent else cursor[k]
            cursor[k] += 1
            checks += 1
            if deadline and checks % _CHECK_EVERY == 0 and time.monotonic() > deadline:
                raise TimeoutError("embedding search exceeded its deadline")
            if used[h] or h_label[h] != lab or h_deg[h] < deg:
                continue
            row = h * n_h
            ok = True
            for w, el in p_adj[u]:
                iw = img[w]
                if iw >= 0 and h_mat[row + iw] != el:
                    ok = False
                    break
            if ok:
                for w in p_forb[u]:
                    iw = img[w]
                    if iw >= 0 and h_mat[row + iw] != 0:
                        ok = False
                        break
            if ok:
                found = h
                break
        if found < 0:
            k -= 1
            continue
        img[u] = found
        used[found] = True
        if k == n_p - 1:
            out.append(tuple(img))
            if limit and len(out) >= limit:
                break
        else:
            k += 1
            enter(k)
    return out
