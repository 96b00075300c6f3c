"""ef-family: exact construction and certification of the E_f continuum family."""

from effamily.archive import export_table, load_archive, make_archive, verify_archive
from effamily.certify.grid import certify_A1, certify_R2, check_phi_hypothesis
from effamily.certify.kappa import kappa_beta_seq, l_constant, verify_condition_i, verify_condition_ii, verify_condition_iii
from effamily.certify.protocol import CertReport
from effamily.errors import EFError
from effamily.params import Params, make_params
from effamily.phi import PhiFunction, build_phi, eval_f, eval_phi
from effamily.reduction import choose_cn, f_sum, pair_index, theta1, unpair_index, verify_theta1_bounds
from effamily.sequence import Choice, DyadicSeq, build_seq, extend_u, verify_un_lemma
from effamily.tree import FamilyTree, build_tree, member_phi, validate_tree, witness

__all__ = [
    "CertReport",
    "Choice",
    "DyadicSeq",
    "EFError",
    "FamilyTree",
    "Params",
    "PhiFunction",
    "build_phi",
    "build_seq",
    "build_tree",
    "certify_A1",
    "certify_R2",
    "check_phi_hypothesis",
    "choose_cn",
    "eval_f",
    "eval_phi",
    "export_table",
    "extend_u",
    "f_sum",
    "kappa_beta_seq",
    "l_constant",
    "load_archive",
    "make_archive",
    "make_params",
    "member_phi",
    "pair_index",
    "theta1",
    "unpair_index",
    "validate_tree",
    "verify_archive",
    "verify_condition_i",
    "verify_condition_ii",
    "verify_condition_iii",
    "verify_theta1_bounds",
    "verify_un_lemma",
    "witness",
]
