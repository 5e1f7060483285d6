"""Plane-strain mechanical pipeline and its five training losses.

Strains come from the first spatial derivative channels of the displacement
outputs, stresses from the plane-strain constitutive matrix with the
position-dependent material values.  The shear entry works on the tensorial
shear strain (the one carrying the 1/2), i.e. sigma_xy = E/(1+nu) * eps_xy,
which equals E/(2(1+nu)) times the engineering shear.

The energy loss is the collocation average of the strain-energy density with
a single sigma_xy*eps_xy shear term, minus the boundary work, wrapped in an
absolute value; its value at the exact solution is therefore not zero.  A
``signed_potential`` switch minimizes the total potential directly instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Dual2
from .domain import EDGES, OUTWARD_NORMALS
from .optimizer import CompiledLoss


class LossConfigError(Exception):
    pass


def plane_strain_coeffs(E, nu):
    """Entries of the plane-strain stiffness: (diagonal, off-diagonal, shear).

    shear is E/(2(1+nu)); it multiplies the engineering shear strain.
    """
    f = E / ((1.0 + nu) * (1.0 - 2.0 * nu))
    return f * (1.0 - nu), f * nu, E / (2.0 * (1.0 + nu))


@dataclass
class ElasticFields:
    """Strains and u-derived stresses over one batch of points."""

    eps_x: object
    eps_y: object
    eps_xy: object
    sig_x: object
    sig_y: object
    sig_xy: object


def strain_stress_from_u(u_x: Dual2, u_y: Dual2, E, nu):
    """Kinematics plus constitutive law applied to displacement duals.

    ``E``/``nu`` are plain floats or arrays broadcastable against the duals'
    channels; they are constants of the problem, never trained.
    """
    c_d, c_o, c_g = plane_strain_coeffs(np.asarray(E, dtype=float),
                                        np.asarray(nu, dtype=float))
    eps_x = u_x.d_x
    eps_y = u_y.d_y
    gamma = ad.add(u_x.d_y, u_y.d_x)             # engineering shear
    eps_xy = ad.mul(0.5, gamma)
    sig_x = ad.add(ad.mul(c_d, eps_x), ad.mul(c_o, eps_y))
    sig_y = ad.add(ad.mul(c_o, eps_x), ad.mul(c_d, eps_y))
    sig_xy = ad.mul(c_g, gamma)
    return ElasticFields(eps_x, eps_y, eps_xy, sig_x, sig_y, sig_xy)


# ----------------------------------------------------------------------
# individual loss terms (work on arrays or tape Vars alike)
def _mean_sq(x):
    return ad.vmean(ad.square(x))


def loss_EF(fields: ElasticFields, work_terms=(), area=1.0, form="literal"):
    """Energy-form loss over interior samples.

    ``work_terms`` holds (traction, displacement, edge length) triples for
    boundary components carrying nonzero prescribed data; each contributes
    length * mean(traction * displacement).
    """
    density = ad.add(ad.add(ad.mul(fields.sig_x, fields.eps_x),
                            ad.mul(fields.sig_y, fields.eps_y)),
                     ad.mul(fields.sig_xy, fields.eps_xy))
    internal = ad.mul(0.5 * area, ad.vmean(density))
    work = 0.0
    for traction, disp, length in work_terms:
        work = ad.add(work, ad.mul(length, ad.vmean(ad.mul(traction, disp))))
    potential = ad.sub(internal, work)
    if form == "literal":
        return ad.absval(potential)
    if form == "signed_potential":
        return potential
    raise LossConfigError(f"unknown energy form {form!r}")


def loss_DBC(residuals):
    """Sum of per-edge-component mean squares of (u - prescribed)."""
    out = 0.0
    for res in residuals:
        out = ad.add(out, _mean_sq(res))
    return out


def loss_cnc(head_stress, derived: ElasticFields):
    """Mean squared mismatch between stress heads and u-derived stresses."""
    sx, sy, sxy = head_stress
    return ad.add(ad.add(_mean_sq(ad.sub(sx, derived.sig_x)),
                         _mean_sq(ad.sub(sy, derived.sig_y))),
                  _mean_sq(ad.sub(sxy, derived.sig_xy)))


def loss_SF(div_x, div_y):
    """Mean squared divergence residual of the stress field."""
    return ad.add(_mean_sq(div_x), _mean_sq(div_y))


def loss_NBC(residuals):
    """Sum of per-edge-component mean squares of (traction - prescribed)."""
    out = 0.0
    for res in residuals:
        out = ad.add(out, _mean_sq(res))
    return out


# ----------------------------------------------------------------------
# assembly
def _slice_dual(d: Dual2, lo, hi):
    second = d.d_xx is not None
    if second:
        return Dual2(ad.cols(d.value, lo, hi), ad.cols(d.d_x, lo, hi),
                     ad.cols(d.d_y, lo, hi), ad.cols(d.d_xx, lo, hi),
                     ad.cols(d.d_xy, lo, hi), ad.cols(d.d_yy, lo, hi))
    return Dual2(ad.cols(d.value, lo, hi), ad.cols(d.d_x, lo, hi),
                 ad.cols(d.d_y, lo, hi))


def _traction(sig_x, sig_y, sig_xy, edge):
    """(t_x, t_y) = sigma . n for an axis-aligned edge."""
    nx, ny = OUTWARD_NORMALS[edge]
    if nx:
        return ad.mul(nx, sig_x), ad.mul(nx, sig_xy)
    return ad.mul(ny, sig_xy), ad.mul(ny, sig_y)


def elastic_terms(fields, slices, materials, bcs, area, edge_lengths,
                  variant, energy_form="literal"):
    """Build the active loss terms of one model variant.

    ``fields`` maps output names to Dual2 batches covering interior points
    followed by the four edges per ``slices``; ``materials`` are arrays
    aligned with the same batch.  Field channels may be tape Vars (training)
    or plain arrays (direct evaluation of manufactured fields).
    """
    E, nu = np.atleast_2d(materials.E), np.atleast_2d(materials.nu)
    derived = strain_stress_from_u(fields["u_x"], fields["u_y"], E, nu)

    lo_i, hi_i = slices["interior"]
    inter = ElasticFields(*[ad.cols(getattr(derived, f), lo_i, hi_i)
                            for f in ("eps_x", "eps_y", "eps_xy",
                                      "sig_x", "sig_y", "sig_xy")])

    terms = {}
    if "EF" in variant.terms:
        work = []
        for edge, comp, value in bcs.dirichlet_items():
            if value == 0.0:
                continue
            lo, hi = slices[edge]
            t_x, t_y = _traction(ad.cols(derived.sig_x, lo, hi),
                                 ad.cols(derived.sig_y, lo, hi),
                                 ad.cols(derived.sig_xy, lo, hi), edge)
            u = fields["u_x"] if comp == "x" else fields["u_y"]
            work.append((t_x if comp == "x" else t_y,
                         ad.cols(u.value, lo, hi), edge_lengths[edge]))
        for edge, comp, value in bcs.neumann_items():
            if value == 0.0:
                continue
            lo, hi = slices[edge]
            if hi <= lo:
                raise LossConfigError(
                    f"loaded Neumann edge {edge!r} has no collocation points")
            u = fields["u_x"] if comp == "x" else fields["u_y"]
            work.append((value, ad.cols(u.value, lo, hi), edge_lengths[edge]))
        terms["EF"] = loss_EF(inter, work, area, energy_form)

    if "DBC" in variant.terms:
        residuals = []
        for edge, comp, value in bcs.dirichlet_items():
            lo, hi = slices[edge]
            u = fields["u_x"] if comp == "x" else fields["u_y"]
            residuals.append(ad.sub(ad.cols(u.value, lo, hi), value))
        terms["DBC"] = loss_DBC(residuals)

    if "cnc" in variant.terms:
        heads = tuple(ad.cols(fields[n].value, lo_i, hi_i)
                      for n in ("sig_x", "sig_y", "sig_xy"))
        terms["cnc"] = loss_cnc(heads, inter)

    if "SF" in variant.terms:
        if variant.sf_source == "heads":
            div_x = ad.add(ad.cols(fields["sig_x"].d_x, lo_i, hi_i),
                           ad.cols(fields["sig_xy"].d_y, lo_i, hi_i))
            div_y = ad.add(ad.cols(fields["sig_y"].d_y, lo_i, hi_i),
                           ad.cols(fields["sig_xy"].d_x, lo_i, hi_i))
        else:
            div_x, div_y = _divergence_from_u(fields, slices, E, nu)
        terms["SF"] = loss_SF(div_x, div_y)

    if "NBC" in variant.terms:
        residuals = []
        for edge, comp, value in bcs.neumann_items():
            lo, hi = slices[edge]
            if variant.nbc_source == "heads":
                sx = ad.cols(fields["sig_x"].value, lo, hi)
                sy = ad.cols(fields["sig_y"].value, lo, hi)
                sxy = ad.cols(fields["sig_xy"].value, lo, hi)
            else:
                sx = ad.cols(derived.sig_x, lo, hi)
                sy = ad.cols(derived.sig_y, lo, hi)
                sxy = ad.cols(derived.sig_xy, lo, hi)
            t_x, t_y = _traction(sx, sy, sxy, edge)
            residuals.append(ad.sub(t_x if comp == "x" else t_y, value))
        terms["NBC"] = loss_NBC(residuals)
    return terms


def _divergence_from_u(fields, slices, E, nu):
    """div(sigma(u)) from second-order displacement channels.

    Material values are piecewise constant, so their spatial derivative is
    zero at every interior sample.
    """
    lo, hi = slices["interior"]
    u_x, u_y = _slice_dual(fields["u_x"], lo, hi), _slice_dual(fields["u_y"], lo, hi)
    if u_x.d_xx is None:
        raise LossConfigError(
            "strong form on the primary variable needs second-order duals")
    c_d, c_o, c_g = plane_strain_coeffs(ad.cols(E, lo, hi), ad.cols(nu, lo, hi))
    div_x = ad.add(ad.add(ad.mul(c_d, u_x.d_xx), ad.mul(c_o, u_y.d_xy)),
                   ad.mul(c_g, ad.add(u_x.d_yy, u_y.d_xy)))
    div_y = ad.add(ad.add(ad.mul(c_o, u_x.d_xy), ad.mul(c_d, u_y.d_yy)),
                   ad.mul(c_g, ad.add(u_x.d_xy, u_y.d_xx)))
    return div_x, div_y


def total_loss(terms):
    """Equal-weight sum of the active terms."""
    total = 0.0
    for term in terms.values():
        if term is not None:
            total = ad.add(total, term)
    return total


def build_elastic_loss(tape, heads, colloc, bcs, energy_form="literal"):
    """Record the full training loss of one variant on a tape.

    ``heads`` must already be bound to ``tape``; returns a CompiledLoss whose
    components can be replayed every epoch.
    """
    pts, slices = colloc.batch()
    mats = colloc.batch_materials()
    x, y = ad.spatial_inputs(pts[:, 0], pts[:, 1],
                             second_order=heads.variant.second_order)
    fields = heads.evaluate(x, y)
    terms = elastic_terms(fields, slices, mats, bcs, colloc.pmap.area,
                          colloc.pmap.edge_lengths, heads.variant, energy_form)
    return CompiledLoss(tape, terms, total_loss(terms))
