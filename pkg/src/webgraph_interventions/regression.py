"""Log-log OLS on domain attribute tables."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd
import scipy.linalg

from .errors import InputError
from .io import read_csv, require_columns

ATTRIBUTE_COLUMNS = ["traffic", "rank", "backlinks", "html_pages", "external_links"]
EXTRA_COLUMNS = ["internal_links", "ugc", "redirect", "root", "edu"]
THREE_VARIABLE_MODEL = ["backlinks", "external_links", "html_pages"]


def make_attributes(df: pd.DataFrame, path=None) -> pd.DataFrame:
    require_columns(df, ["domain"] + ATTRIBUTE_COLUMNS, path)
    df = df.copy()
    df["domain"] = df["domain"].astype(str).str.strip()
    for col in ATTRIBUTE_COLUMNS + [c for c in EXTRA_COLUMNS if c in df.columns]:
        values = pd.to_numeric(df[col], errors="coerce")
        if values.isna().any():
            row = int(np.flatnonzero(values.isna().to_numpy())[0])
            raise InputError(f"non-numeric {col} {df[col].iloc[row]!r}", path, row + 2)
        df[col] = values.astype(np.float64)
    if df["domain"].duplicated().any():
        dup = df.loc[df["domain"].duplicated(), "domain"].iloc[0]
        raise InputError(f"duplicate domain {dup!r}", path)
    return df.reset_index(drop=True)


def load_attributes(path) -> pd.DataFrame:
    return make_attributes(read_csv(path, dtype={"domain": str}, keep_default_na=False), path)


def usable_rows(attrs: pd.DataFrame, columns) -> np.ndarray:
    """Rows whose listed columns are all finite and strictly positive."""
    values = attrs[list(columns)].to_numpy(dtype=np.float64)
    return np.all(np.isfinite(values) & (values > 0), axis=1)


@dataclass(frozen=True)
class RegressionModel:
    dependent: str
    regressors: tuple[str, ...]
    intercept: float
    coefficients: np.ndarray
    r_squared: float
    adj_r_squared: float
    n_used: int
    n_excluded: int
    std_errors: np.ndarray = field(repr=False)
    t_stats: np.ndarray = field(repr=False)

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.regressors.index(name)])

    def predict_log(self, attrs: pd.DataFrame) -> np.ndarray:
        """ln(y_hat) per row; NaN where a regressor is not positive."""
        x = attrs[list(self.regressors)].to_numpy(dtype=np.float64)
        with np.errstate(divide="ignore", invalid="ignore"):
            logx = np.where(x > 0, np.log(np.where(x > 0, x, 1.0)), np.nan)
        return self.intercept + logx @ self.coefficients

    @classmethod
    def from_dict(cls, d: dict) -> "RegressionModel":
        regs = tuple(d["coefficients"])
        return cls(
            dependent=d["dependent"],
            regressors=regs,
            intercept=float(d["intercept"]),
            coefficients=np.array([d["coefficients"][r] for r in regs], dtype=np.float64),
            r_squared=float(d["r_squared"]),
            adj_r_squared=float(d["adj_r_squared"]),
            n_used=int(d["n_used"]),
            n_excluded=int(d["n_excluded"]),
            std_errors=np.array([d["std_errors"][r] for r in regs], dtype=np.float64),
            t_stats=np.array([d["t_stats"][r] for r in regs], dtype=np.float64),
        )

    def to_dict(self) -> dict:
        return {
            "dependent": self.dependent,
            "intercept": self.intercept,
            "coefficients": dict(zip(self.regressors, map(float, self.coefficients))),
            "std_errors": dict(zip(self.regressors, map(float, self.std_errors))),
            "t_stats": dict(zip(self.regressors, map(float, self.t_stats))),
            "r_squared": self.r_squared,
            "adj_r_squared": self.adj_r_squared,
            "n_used": self.n_used,
            "n_excluded": self.n_excluded,
        }


def fit_loglog_regression(attrs: pd.DataFrame, dependent: str, regressors=THREE_VARIABLE_MODEL) -> RegressionModel:
    """Fit ln(y) = b0 + sum_k b_k ln(x_k) by least squares.

    The design is column-centred and solved with a column-pivoted QR, so the
    intercept drops out of the solve and rank deficiency is detected from the
    pivoted diagonal instead of surfacing as a singular normal matrix.
    """
    regressors = tuple(regressors)
    if not regressors:
        raise ValueError("need at least one regressor")
    cols = [dependent, *regressors]
    require_columns(attrs, cols)
    mask = usable_rows(attrs, cols)
    n, k = int(mask.sum()), len(regressors)
    if n < k + 2:
        raise ValueError(f"need at least {k + 2} usable rows, have {n}")

    y = np.log(attrs.loc[mask, dependent].to_numpy(dtype=np.float64))
    X = np.log(attrs.loc[mask, list(regressors)].to_numpy(dtype=np.float64))
    x_mean, y_mean = X.mean(axis=0), y.mean()
    Xc, yc = X - x_mean, y - y_mean

    Q, R, piv = scipy.linalg.qr(Xc, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size < k or diag[-1] <= 1e-10 * diag[0]:
        bad = regressors[piv[-1]]
        raise ValueError(f"design matrix is rank deficient (check regressor {bad!r})")
    beta = np.empty(k)
    beta[piv] = scipy.linalg.solve_triangular(R, Q.T @ yc)
    intercept = float(y_mean - x_mean @ beta)

    resid = yc - Xc @ beta
    ssr = float(resid @ resid)
    sst = float(yc @ yc)
    r2 = 1.0 - ssr / sst if sst > 0 else 1.0
    dof = n - k - 1
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof
    sigma2 = ssr / dof
    rinv = scipy.linalg.solve_triangular(R, np.eye(k))
    cov_p = sigma2 * (rinv @ rinv.T)
    se = np.empty(k)
    se[piv] = np.sqrt(np.diag(cov_p))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / se, np.inf)
    return RegressionModel(
        dependent=dependent,
        regressors=regressors,
        intercept=intercept,
        coefficients=beta,
        r_squared=r2,
        adj_r_squared=adj,
        n_used=n,
        n_excluded=len(attrs) - n,
        std_errors=se,
        t_stats=t,
    )
