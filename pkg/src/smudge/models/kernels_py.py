"""NumPy fallback for the SGD inner loops.

Same contracts as the compiled extension (`smudge.models._kernels`); the
backend module picks whichever is importable. Weight averaging for the hinge
trainer uses the standard scale/accumulator factorization:

    w_t = P_t * v_t,   P_t = prod_{u<=t} (1 - eta_u * l2)

so L2 decay costs one scalar multiply per step, and with S_t = sum_{u<=t} P_u
the running average of iterates is recovered exactly at any step as

    mean_{u<=t} w_u = (S_t * v_t - A_t) / t,   A_t = sum_u S_{u-1} * delta_u

where delta_u is the sparse additive update applied to v at step u.
"""

from __future__ import annotations

import numpy as np


def hinge_epoch(
    data,
    indices,
    indptr,
    y_signs,
    order,
    v,
    acc,
    bias,
    bias_acc,
    scale,
    scale_sum,
    step,
    eta0,
    l2,
    total_steps,
):
    """One epoch of one-vs-rest hinge subgradient descent with iterate averaging.

    Mutates v, acc, bias, bias_acc in place; returns the updated
    (scale, scale_sum, step) scalars. The learning rate decays linearly from
    eta0 to eta0 / total_steps.
    """
    for i in order:
        lo, hi = indptr[i], indptr[i + 1]
        idx = indices[lo:hi]
        vals = data[lo:hi]
        y = y_signs[:, i]
        margins = scale * (v[:, idx] @ vals) + bias
        step += 1
        eta = eta0 * (total_steps - step + 1) / total_steps
        scale *= 1.0 - eta * l2
        violating = np.nonzero(y * margins < 1.0)[0]
        if violating.size:
            delta = (eta / scale) * y[violating]
            update = delta[:, None] * vals[None, :]
            v[np.ix_(violating, idx)] += update
            acc[np.ix_(violating, idx)] += scale_sum * update
            bias[violating] += eta * y[violating]
        bias_acc += bias
        scale_sum += scale
    return scale, scale_sum, step


def emb_epoch(
    data,
    indices,
    indptr,
    labels,
    order,
    emb,
    out_w,
    out_b,
    step,
    eta0,
    l2,
    total_steps,
):
    """One epoch of SGD on the mean-embedding softmax classifier.

    Per document: hidden state is the count-weighted mean of its token
    embeddings, followed by a linear layer and softmax cross-entropy. L2
    applies to the output weights only. Mutates emb, out_w, out_b in place;
    returns the updated step counter.
    """
    dim = emb.shape[1]
    zero_h = np.zeros(dim)
    for i in order:
        lo, hi = indptr[i], indptr[i + 1]
        idx = indices[lo:hi]
        counts = data[lo:hi]
        step += 1
        eta = eta0 * (total_steps - step + 1) / total_steps
        if hi > lo:
            total = counts.sum()
            h = (counts @ emb[idx]) / total
        else:
            total = 0.0
            h = zero_h
        z = out_w @ h + out_b
        z = z - z.max()
        ez = np.exp(z)
        gz = ez / ez.sum()
        gz[labels[i]] -= 1.0
        # multiply-then-reduce rather than dgemv: BLAS FMA kernels would make
        # the class reduction sensitive to label order
        grad_h = (out_w * gz[:, None]).sum(axis=0)
        out_w *= 1.0 - eta * l2
        out_w -= eta * np.outer(gz, h)
        out_b -= eta * gz
        if hi > lo:
            emb[idx] -= (eta / total) * counts[:, None] * grad_h[None, :]
    return step
