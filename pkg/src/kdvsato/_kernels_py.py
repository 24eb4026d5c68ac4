"""Pure-numpy fallback implementations of the hot kernels.

Two operations dominate the per-grid-point cost and are therefore also
provided as a compiled extension (``_kernels.pyx``): dense assembly of the
discretized operator and batched off-curve Cauchy sums.  This module is the
reference implementation; the compiled module must match it to rounding.
"""

from __future__ import annotations

import numpy as np

TWO_PI_I = 2j * np.pi


def assemble_operator(K, neg, d1, d2, gf1, gf2):
    """Assemble the dense matrix of u -> g*f*u_parity + p_plus(g*atilde*u_parity).

    Parameters
    ----------
    K : (M, M) complex ndarray
        Boundary plus-projection matrix of the contour.
    neg : (M,) integer ndarray
        Index map realizing lam -> -lam on the node set.
    d1, d2 : (M,) complex ndarray
        Samples of g*atilde_1 and g*atilde_2 at the nodes.
    gf1, gf2 : (M,) complex ndarray
        Samples of g*f_1 and g*f_2 at the nodes.

    Returns
    -------
    (M, M) complex ndarray
        Matrix acting on node-sample vectors; even/odd parts are taken
        through the ``neg`` permutation, so a single dense matrix captures
        both parity channels.
    """
    cplus = 0.5 * (d1 + d2)
    cminus = 0.5 * (d1 - d2)
    out = K * cplus[np.newaxis, :]
    out += K[:, neg] * cminus[neg][np.newaxis, :]
    m = K.shape[0]
    rows = np.arange(m)
    out[rows, rows] += 0.5 * (gf1 + gf2)
    out[rows, neg] += 0.5 * (gf1 - gf2)
    return out


def cauchy_targets(nodes, wf, targets):
    """Evaluate (1/2pi i) * sum_j wf_j / (nodes_j - z) for a batch of z.

    Parameters
    ----------
    nodes : (M,) complex ndarray
        Contour nodes.
    wf : (M,) complex ndarray
        Quadrature weights already multiplied by the density samples.
    targets : (K,) complex ndarray
        Off-curve evaluation points.

    Returns
    -------
    (K,) complex ndarray
    """
    diff = nodes[np.newaxis, :] - targets[:, np.newaxis]
    return (1.0 / diff) @ wf / TWO_PI_I
