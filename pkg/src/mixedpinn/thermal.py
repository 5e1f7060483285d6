"""Steady-state diffusion pipeline and its training losses.

The derived flux is Fourier's law applied to the temperature output's
gradient channels with the position-dependent conductivity.  The energy loss
follows the expanded collocation form literally: the interior part is half
the mean of q . grad(T) (note q = -k grad(T) makes this negative), and
Dirichlet edges with nonzero prescribed temperature contribute the mean of
the inward flux times the temperature.  Its value at the exact solution of
the standard left-right gradient problem is k/2, not zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Dual2
from .domain import OUTWARD_NORMALS
from .elastic import LossConfigError, _mean_sq, _slice_dual, total_loss
from .optimizer import CompiledLoss


@dataclass
class ThermalFields:
    """Temperature gradient and derived flux over one batch of points."""

    grad_x: object
    grad_y: object
    q_x: object
    q_y: object


def flux_from_T(T: Dual2, k):
    """Fourier's law on the temperature dual's gradient channels."""
    k = np.asarray(k, dtype=float)
    return ThermalFields(T.d_x, T.d_y,
                         ad.mul(-k, T.d_x), ad.mul(-k, T.d_y))


def loss_EF(fields: ThermalFields, work_terms=(), area=1.0, form="literal",
            k=None):
    """Energy-form loss over interior samples.

    literal: |0.5 * area * mean(q . grad T) + sum of boundary work terms|
    where each work term is length * mean(flux_factor * T).
    signed_potential: 0.5 * area * mean(k |grad T|^2) plus prescribed-flux
    work on Neumann edges only (the ``work_terms`` the caller passes must
    match the chosen form).
    """
    if form == "literal":
        density = ad.add(ad.mul(fields.q_x, fields.grad_x),
                         ad.mul(fields.q_y, fields.grad_y))
        acc = ad.mul(0.5 * area, ad.vmean(density))
        for factor, temp, length in work_terms:
            acc = ad.add(acc, ad.mul(length, ad.vmean(ad.mul(factor, temp))))
        return ad.absval(acc)
    if form == "signed_potential":
        density = ad.mul(k, ad.add(ad.square(fields.grad_x),
                                   ad.square(fields.grad_y)))
        acc = ad.mul(0.5 * area, ad.vmean(density))
        for factor, temp, length in work_terms:
            acc = ad.add(acc, ad.mul(length, ad.vmean(ad.mul(factor, temp))))
        return acc
    raise LossConfigError(f"unknown energy form {form!r}")


def loss_cnc(head_flux, derived: ThermalFields):
    qx, qy = head_flux
    return ad.add(_mean_sq(ad.sub(qx, derived.q_x)),
                  _mean_sq(ad.sub(qy, derived.q_y)))


def loss_SF(div_q):
    return _mean_sq(div_q)


def thermal_terms(fields, slices, materials, bcs, area, edge_lengths,
                  variant, energy_form="literal"):
    """Active loss terms of one model variant for the diffusion problem."""
    k = np.atleast_2d(materials.k)
    derived = flux_from_T(fields["T"], k)
    lo_i, hi_i = slices["interior"]
    inter = ThermalFields(*[ad.cols(getattr(derived, f), lo_i, hi_i)
                            for f in ("grad_x", "grad_y", "q_x", "q_y")])

    terms = {}
    if "EF" in variant.terms:
        work = []
        if energy_form == "literal":
            for edge, comp, value in bcs.dirichlet_items():
                if value == 0.0:
                    continue
                lo, hi = slices[edge]
                nx, ny = OUTWARD_NORMALS[edge]
                # written with the inward normal: the left edge of the
                # reference problem enters as +q_x * T
                q_in = ad.sub(0.0, _normal_flux(derived, lo, hi, nx, ny))
                work.append((q_in, ad.cols(fields["T"].value, lo, hi),
                             edge_lengths[edge]))
            for edge, comp, value in bcs.neumann_items():
                if value == 0.0:
                    continue
                lo, hi = slices[edge]
                if hi <= lo:
                    raise LossConfigError(
                        f"loaded Neumann edge {edge!r} has no collocation points")
                work.append((value, ad.cols(fields["T"].value, lo, hi),
                             edge_lengths[edge]))
        else:
            for edge, comp, value in bcs.neumann_items():
                if value == 0.0:
                    continue
                lo, hi = slices[edge]
                work.append((value, ad.cols(fields["T"].value, lo, hi),
                             edge_lengths[edge]))
        terms["EF"] = loss_EF(inter, work, area, energy_form,
                              k=np.atleast_2d(materials.k)[:, lo_i:hi_i])

    if "DBC" in variant.terms:
        residuals = []
        for edge, comp, value in bcs.dirichlet_items():
            lo, hi = slices[edge]
            residuals.append(ad.sub(ad.cols(fields["T"].value, lo, hi), value))
        out = 0.0
        for res in residuals:
            out = ad.add(out, _mean_sq(res))
        terms["DBC"] = out

    if "cnc" in variant.terms:
        heads = (ad.cols(fields["q_x"].value, lo_i, hi_i),
                 ad.cols(fields["q_y"].value, lo_i, hi_i))
        terms["cnc"] = loss_cnc(heads, inter)

    if "SF" in variant.terms:
        if variant.sf_source == "heads":
            div_q = ad.add(ad.cols(fields["q_x"].d_x, lo_i, hi_i),
                           ad.cols(fields["q_y"].d_y, lo_i, hi_i))
        else:
            T = _slice_dual(fields["T"], lo_i, hi_i)
            if T.d_xx is None:
                raise LossConfigError(
                    "strong form on the primary variable needs second-order duals")
            k_i = np.atleast_2d(materials.k)[:, lo_i:hi_i]
            div_q = ad.mul(-k_i, ad.add(T.d_xx, T.d_yy))
        terms["SF"] = loss_SF(div_q)

    if "NBC" in variant.terms:
        out = 0.0
        for edge, comp, value in bcs.neumann_items():
            lo, hi = slices[edge]
            nx, ny = OUTWARD_NORMALS[edge]
            if variant.nbc_source == "heads":
                qn = ad.add(ad.mul(nx, ad.cols(fields["q_x"].value, lo, hi)),
                            ad.mul(ny, ad.cols(fields["q_y"].value, lo, hi)))
            else:
                qn = _normal_flux(derived, lo, hi, nx, ny)
            out = ad.add(out, _mean_sq(ad.sub(qn, value)))
        terms["NBC"] = out
    return terms


def _normal_flux(derived: ThermalFields, lo, hi, nx, ny):
    return ad.add(ad.mul(nx, ad.cols(derived.q_x, lo, hi)),
                  ad.mul(ny, ad.cols(derived.q_y, lo, hi)))


def thermal_losses(fields, slices, materials, bcs, area, edge_lengths,
                   variant, energy_form="literal"):
    """Terms plus their equal-weight total, as plain values."""
    terms = thermal_terms(fields, slices, materials, bcs, area, edge_lengths,
                          variant, energy_form)
    return terms, total_loss(terms)


def build_thermal_loss(tape, heads, colloc, bcs, energy_form="literal"):
    """Record the full diffusion training loss of one variant on a tape."""
    pts, slices = colloc.batch()
    mats = colloc.batch_materials()
    x, y = ad.spatial_inputs(pts[:, 0], pts[:, 1],
                             second_order=heads.variant.second_order)
    fields = heads.evaluate(x, y)
    terms = thermal_terms(fields, slices, mats, bcs, colloc.pmap.area,
                          colloc.pmap.edge_lengths, heads.variant, energy_form)
    return CompiledLoss(tape, terms, total_loss(terms))
