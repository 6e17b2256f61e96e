"""Pure-numpy ranking kernel (fallback when the compiled kernel is absent)."""

from __future__ import annotations

import numpy as np


def rank_queries(order: np.ndarray, query_ids: np.ndarray, query_cams: np.ndarray,
                 gallery_ids: np.ndarray, gallery_cams: np.ndarray,
                 gallery_junk: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Walk each query's distance-sorted gallery; junk entries do not consume ranks.

    Returns (average precision, 1-indexed rank of first match, valid flag) per
    query. A query with no cross-camera match among kept items is invalid.
    """
    num_q = order.shape[0]
    ap = np.zeros(num_q, dtype=np.float64)
    first_rank = np.zeros(num_q, dtype=np.int64)
    valid = np.zeros(num_q, dtype=bool)
    flagged = np.asarray(gallery_junk, dtype=bool)
    for i in range(num_q):
        o = order[i]
        qid, qcam = query_ids[i], query_cams[i]
        junk = flagged[o] | ((gallery_ids[o] == qid) & (gallery_cams[o] == qcam))
        kept = o[~junk]
        relevant = gallery_ids[kept] == qid
        hits = int(relevant.sum())
        if hits == 0:
            continue
        ranks = np.arange(1, kept.size + 1, dtype=np.float64)
        precision = np.cumsum(relevant, dtype=np.float64) / ranks
        ap[i] = float(precision[relevant].sum()) / hits
        first_rank[i] = int(np.argmax(relevant)) + 1
        valid[i] = True
    return ap, first_rank, valid
