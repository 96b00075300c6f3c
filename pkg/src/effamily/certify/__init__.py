"""Exact certificates for the E_f hypotheses.

Grid certificates live in `effamily.certify.grid` and the kappa conditions
in `effamily.certify.kappa`; both import the phi layer, so only the shared
report types are re-exported here.
"""

from effamily.certify.protocol import CertificateProtocol, CertReport, report_fail, report_pass

__all__ = ["CertReport", "CertificateProtocol", "report_fail", "report_pass"]
