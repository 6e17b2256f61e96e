# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled ranking kernel; semantics identical to ``_rank_py.rank_queries``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def rank_queries(cnp.int64_t[:, ::1] order,
                 cnp.int64_t[::1] query_ids, cnp.int64_t[::1] query_cams,
                 cnp.int64_t[::1] gallery_ids, cnp.int64_t[::1] gallery_cams,
                 cnp.uint8_t[::1] gallery_junk):
    cdef Py_ssize_t num_q = order.shape[0]
    cdef Py_ssize_t num_g = order.shape[1]

    ap_arr = np.zeros(num_q, dtype=np.float64)
    first_arr = np.zeros(num_q, dtype=np.int64)
    valid_arr = np.zeros(num_q, dtype=np.uint8)
    cdef double[::1] ap = ap_arr
    cdef cnp.int64_t[::1] first_rank = first_arr
    cdef cnp.uint8_t[::1] valid = valid_arr

    cdef Py_ssize_t i, j, g, rank, hits
    cdef cnp.int64_t qid, qcam
    cdef double ap_sum

    for i in range(num_q):
        qid = query_ids[i]
        qcam = query_cams[i]
        rank = 0
        hits = 0
        ap_sum = 0.0
        for j in range(num_g):
            g = order[i, j]
            if gallery_junk[g] or (gallery_ids[g] == qid and gallery_cams[g] == qcam):
                continue
            rank += 1
            if gallery_ids[g] == qid:
                hits += 1
                ap_sum += (<double> hits) / (<double> rank)
                if first_rank[i] == 0:
                    first_rank[i] = rank
        if hits > 0:
            ap[i] = ap_sum / hits
            valid[i] = 1
    return ap_arr, first_arr, valid_arr.astype(bool)
