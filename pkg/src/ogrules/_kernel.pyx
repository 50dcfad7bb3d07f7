# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled backtracking embedding search (see ``_kernel_py`` for the reference)."""
import time

from libc.stdlib cimport malloc, free

DEF CHECK_MASK = 16383


def embeddings(const int[::1] order, const int[::1] parent, const int[::1] p_label,
               const int[::1] p_deg, const int[::1] p_ptr, const int[::1] p_idx,
               const int[::1] p_elab, const int[::1] f_ptr, const int[::1] f_idx,
               const int[::1] h_label, const int[::1] h_deg, const int[::1] h_ptr,
               const int[::1] h_idx, const int[::1] h_mat, long limit=0,
               double deadline=0.0):
    cdef Py_ssize_t n_p = order.shape[0]
    cdef Py_ssize_t n_h = h_label.shape[0]
    if n_p == 0:
        return [()]
    cdef int *img = <int *> malloc(n_p * sizeof(int))
    cdef int *cursor = <int *> malloc(n_p * sizeof(int))
    cdef int *end = <int *> malloc(n_p * sizeof(int))
    cdef char *used = <char *> malloc((n_h + 1) * sizeof(char))
    if not img or not cursor or not end or not used:
        free(img); free(cursor); free(end); free(used)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef int k, u, h, w, iw, par, lab, deg, found, via_parent
    cdef long row
    cdef bint ok
    cdef unsigned long checks = 0
    out = []
    try:
        for i in range(n_p):
            img[i] = -1
        for i in range(n_h):
            used[i] = 0
        k = 0
        par = parent[0]
        if par >= 0:
            cursor[0] = h_ptr[img[par]]
            end[0] = h_ptr[img[par] + 1]
        else:
            cursor[0] = 0
            end[0] = <int> n_h
        while k >= 0:
            u = order[k]
            if img[u] >= 0:
                used[img[u]] = 0
                img[u] = -1
            found = -1
            via_parent = parent[k] >= 0
            lab = p_label[u]
            deg = p_deg[u]
            while cursor[k] < end[k]:
                if via_parent:
                    h = h_idx[cursor[k]]
                else:
                    h = cursor[k]
                cursor[k] += 1
                checks += 1
                if deadline > 0 and (checks & CHECK_MASK) == 0:
                    if time.monotonic() > deadline:
                        raise TimeoutError("embedding search exceeded its deadline")
                if used[h] or h_label[h] != lab or h_deg[h] < deg:
                    continue
                row = <long> h * n_h
                ok = True
                for j in range(p_ptr[u], p_ptr[u + 1]):
                    w = p_idx[j]
                    iw = img[w]
                    if iw >= 0 and h_mat[row + iw] != p_elab[j] + 1:
                        ok = False
                        break
                if ok:
                    for j in range(f_ptr[u], f_ptr[u + 1]):
                        iw = img[f_idx[j]]
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
            used[found] = 1
            if k == n_p - 1:
                out.append(tuple([img[i] for i in range(n_p)]))
                if limit and len(out) >= limit:
                    break
            else:
                k += 1
                par = parent[k]
                if par >= 0:
                    cursor[k] = h_ptr[img[par]]
                    end[k] = h_ptr[img[par] + 1]
                else:
                    cursor[k] = 0
                    end[k] = <int> n_h
    finally:
        free(img)
        free(cursor)
        free(end)
        free(used)
    return out
