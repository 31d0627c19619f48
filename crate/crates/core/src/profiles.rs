//! One-dimensional profile solutions of −M±(D²u) + s·|Du|^p = 0 on the
//! half-space {y ≥ 0}, extended constantly in the tangential directions.
//!
//! Two families exist, split by the gradient exponent p:
//!
//! * **Low p** (1 < p < 2, s = +1): bounded decreasing convex profiles
//!   u(y) = l + ∫_y^∞ [((p−1)/κ)(t + C)]^{−1/(p−1)} dt with u(0) = M,
//!   u(∞) = l, where κ = Λ for M⁺ and κ = λ for M⁻.  The shooting constant
//!   C is the unique value matching the boundary condition; the integral has
//!   the closed form used throughout this module.
//! * **High p** (p > 2, s = −1): unbounded increasing concave profiles
//!   u_ĉ(y) = u₀(y + ĉ) − u₀(ĉ) built from u₀(t) = c_full·t^{(p−2)/(p−1)},
//!   where κ = λ for M⁺ and κ = Λ for M⁻, c_p = (κ/(p−1))^{1/(p−1)} and
//!   c_full = c_p·(p−1)/(p−2).  |u'| = c_p·(y+ĉ)^{−1/(p−1)} realizes the
//!   gradient envelope sharply.
//!
//! The degenerate members (l = M in the low family, κ = 0 in either) are the
//! constant profiles; they are represented inside the same types with the
//! shooting constant absent rather than stored as +∞.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::SymmetricMatrix;
use crate::pucci::{pucci_eval, Ellipticity, OperatorKind, PucciError};
use crate::scalar::{real, to_f64, Real};

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("low-p family needs 1 < p < 2, got p = {p}")]
    LowExponentRange { p: f64 },
    #[error("high-p family needs p > 2, got p = {p}")]
    HighExponentRange { p: f64 },
    #[error("boundary ordering must be 0 <= limit <= boundary, got boundary = {boundary}, limit = {limit}")]
    BadOrdering { boundary: f64, limit: f64 },
    #[error("selected ellipticity weight kappa vanishes; only the constant profile exists")]
    DegenerateKappa,
    #[error("shift must be nonnegative and finite, got {chat}")]
    BadShift { chat: f64 },
    #[error("profiles live on y >= 0, got y = {y}")]
    NegativeCoordinate { y: f64 },
    #[error("derivatives are singular at y = 0 when the shift vanishes")]
    SingularPoint,
    #[error("distance to the boundary must be positive, got d = {d}")]
    NonPositiveDistance { d: f64 },
    #[error("operation applies to the {expected} family, got {got}")]
    WrongFamily { expected: &'static str, got: &'static str },
    #[error("Hessian embedding needs dimension >= 1")]
    ZeroDim,
    #[error(transparent)]
    Pucci(#[from] PucciError),
}

/// Sign s of the gradient term in −M±(D²u) + s·|Du|^p = f.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HamiltonianSign {
    Plus,
    Minus,
}

impl HamiltonianSign {
    pub fn factor<F: Real>(self) -> F {
        match self {
            HamiltonianSign::Plus => F::one(),
            HamiltonianSign::Minus => -F::one(),
        }
    }
}

impl std::fmt::Display for HamiltonianSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HamiltonianSign::Plus => write!(f, "plus"),
            HamiltonianSign::Minus => write!(f, "minus"),
        }
    }
}

impl std::str::FromStr for HamiltonianSign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plus" | "+" | "+1" | "pos" => Ok(HamiltonianSign::Plus),
            "minus" | "-" | "-1" | "neg" => Ok(HamiltonianSign::Minus),
            other => Err(format!("unknown sign {other:?}, expected \"plus\" or \"minus\"")),
        }
    }
}

/// Classification constant of the high-p family: returns (c_p, c_full) with
/// c_p = (κ/(p−1))^{1/(p−1)}, c_full = c_p·(p−1)/(p−2), κ selected by the
/// operator kind (λ for M⁺, Λ for M⁻).
pub fn classification_constant<F: Real>(
    p: F,
    ell: &Ellipticity<F>,
    kind: OperatorKind,
) -> Result<(F, F), ProfileError> {
    if !(p > real(2.0)) || !p.is_finite() {
        return Err(ProfileError::HighExponentRange { p: to_f64(p) });
    }
    let kappa = high_p_kappa(ell, kind);
    let c_p = (kappa / (p - F::one())).powf(F::one() / (p - F::one()));
    let c_full = c_p * (p - F::one()) / (p - real(2.0));
    Ok((c_p, c_full))
}

fn high_p_kappa<F: Real>(ell: &Ellipticity<F>, kind: OperatorKind) -> F {
    match kind {
        OperatorKind::Plus => ell.lambda,
        OperatorKind::Minus => ell.big_lambda,
    }
}

fn low_p_kappa<F: Real>(ell: &Ellipticity<F>, kind: OperatorKind) -> F {
    match kind {
        OperatorKind::Plus => ell.big_lambda,
        OperatorKind::Minus => ell.lambda,
    }
}

/// Shooting constant C of the low-p profile with boundary value `boundary`,
/// limit `limit` and ellipticity weight `kappa`, from the closed form of the
/// defining integral ∫_0^∞ [((p−1)/κ)(t+C)]^{−1/(p−1)} dt = boundary − limit:
/// with m = 1/(p−1) and A = (p−1)/κ,
///
///   C = [(boundary − limit)·(m − 1)·A^m]^{−1/(m−1)}.
pub fn lowp_shooting_constant<F: Real>(p: F, boundary: F, limit: F, kappa: F) -> Result<F, ProfileError> {
    if !(p > F::one() && p < real(2.0)) {
        return Err(ProfileError::LowExponentRange { p: to_f64(p) });
    }
    if !(limit >= F::zero() && limit < boundary) || !boundary.is_finite() {
        return Err(ProfileError::BadOrdering { boundary: to_f64(boundary), limit: to_f64(limit) });
    }
    if !(kappa > F::zero()) {
        return Err(ProfileError::DegenerateKappa);
    }
    let m = F::one() / (p - F::one());
    let a = (p - F::one()) / kappa;
    Ok(((boundary - limit) * (m - F::one()) * a.powf(m)).powf(-F::one() / (m - F::one())))
}

/// Bounded decreasing profile of the low-p family (or its constant
/// degeneration when `limit == boundary`, in which case no shooting constant
/// is stored).
#[derive(Debug, Clone, PartialEq)]
pub struct LowPProfile<F> {
    p: F,
    boundary: F,
    limit: F,
    kind: OperatorKind,
    ell: Ellipticity<F>,
    kappa: F,
    shoot: Option<F>,
}

/// Unbounded increasing profile of the high-p family.  `c_p = 0` (possible
/// only for M⁺ with λ = 0) degenerates to the zero profile.
#[derive(Debug, Clone, PartialEq)]
pub struct HighPProfile<F> {
    p: F,
    shift: F,
    kind: OperatorKind,
    ell: Ellipticity<F>,
    kappa: F,
    c_p: F,
    c_full: F,
}

/// A profile from either family, with uniform evaluation and serialization.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<F> {
    LowP(LowPProfile<F>),
    HighP(HighPProfile<F>),
}

impl<F: Real> Profile<F> {
    /// Low-p profile with u(0) = `boundary`, u(∞) = `limit`.
    /// `limit == boundary` yields the constant profile u ≡ boundary.
    pub fn low_p(p: F, boundary: F, limit: F, kind: OperatorKind, ell: Ellipticity<F>) -> Result<Self, ProfileError> {
        if !(p > F::one() && p < real(2.0)) {
            return Err(ProfileError::LowExponentRange { p: to_f64(p) });
        }
        if !(F::zero() <= limit && limit <= boundary) || !boundary.is_finite() {
            return Err(ProfileError::BadOrdering { boundary: to_f64(boundary), limit: to_f64(limit) });
        }
        let kappa = low_p_kappa(&ell, kind);
        let shoot = if limit == boundary {
            None
        } else {
            Some(lowp_shooting_constant(p, boundary, limit, kappa)?)
        };
        Ok(Profile::LowP(LowPProfile { p, boundary, limit, kind, ell, kappa, shoot }))
    }

    /// High-p profile u_ĉ with shift `chat` ≥ 0.
    pub fn high_p(p: F, chat: F, kind: OperatorKind, ell: Ellipticity<F>) -> Result<Self, ProfileError> {
        if !(chat >= F::zero()) || !chat.is_finite() {
            return Err(ProfileError::BadShift { chat: to_f64(chat) });
        }
        let (c_p, c_full) = classification_constant(p, &ell, kind)?;
        let kappa = high_p_kappa(&ell, kind);
        Ok(Profile::HighP(HighPProfile { p, shift: chat, kind, ell, kappa, c_p, c_full }))
    }

    pub fn family(&self) -> &'static str {
        match self {
            Profile::LowP(_) => "lowp",
            Profile::HighP(_) => "highp",
        }
    }

    pub fn p(&self) -> F {
        match self {
            Profile::LowP(pr) => pr.p,
            Profile::HighP(pr) => pr.p,
        }
    }

    pub fn kind(&self) -> OperatorKind {
        match self {
            Profile::LowP(pr) => pr.kind,
            Profile::HighP(pr) => pr.kind,
        }
    }

    pub fn ellipticity(&self) -> Ellipticity<F> {
        match self {
            Profile::LowP(pr) => pr.ell,
            Profile::HighP(pr) => pr.ell,
        }
    }

    /// Natural sign of the gradient term for which this family solves the
    /// equation exactly: +1 for low p, −1 for high p.
    pub fn natural_sign(&self) -> HamiltonianSign {
        match self {
            Profile::LowP(_) => HamiltonianSign::Plus,
            Profile::HighP(_) => HamiltonianSign::Minus,
        }
    }

    /// Profile value u(y); defined for all y ≥ 0 including singular points.
    pub fn value(&self, y: F) -> Result<F, ProfileError> {
        if !(y >= F::zero()) {
            return Err(ProfileError::NegativeCoordinate { y: to_f64(y) });
        }
        Ok(match self {
            Profile::LowP(pr) => pr.value_unchecked(y),
            Profile::HighP(pr) => pr.value_unchecked(y),
        })
    }

    /// (u, u', u'') at y ≥ 0.  Fails at y = 0 for a high-p profile with zero
    /// shift, where the derivatives blow up.
    pub fn eval(&self, y: F) -> Result<(F, F, F), ProfileError> {
        if !(y >= F::zero()) {
            return Err(ProfileError::NegativeCoordinate { y: to_f64(y) });
        }
        match self {
            Profile::LowP(pr) => Ok(pr.eval_unchecked(y)),
            Profile::HighP(pr) => {
                if pr.c_p > F::zero() && y + pr.shift <= F::zero() {
                    return Err(ProfileError::SingularPoint);
                }
                Ok(pr.eval_unchecked(y))
            }
        }
    }

    pub fn as_low_p(&self) -> Result<&LowPProfile<F>, ProfileError> {
        match self {
            Profile::LowP(pr) => Ok(pr),
            Profile::HighP(_) => Err(ProfileError::WrongFamily { expected: "lowp", got: "highp" }),
        }
    }

    pub fn to_record(&self) -> ProfileRecord {
        match self {
            Profile::LowP(pr) => ProfileRecord {
                family: ProfileFamily::Lowp,
                p: to_f64(pr.p),
                lambda: to_f64(pr.ell.lambda),
                big_lambda: to_f64(pr.ell.big_lambda),
                kind: pr.kind,
                boundary: Some(to_f64(pr.boundary)),
                limit: Some(to_f64(pr.limit)),
                shoot: pr.shoot.map(to_f64),
                chat: None,
            },
            Profile::HighP(pr) => ProfileRecord {
                family: ProfileFamily::Highp,
                p: to_f64(pr.p),
                lambda: to_f64(pr.ell.lambda),
                big_lambda: to_f64(pr.ell.big_lambda),
                kind: pr.kind,
                boundary: None,
                limit: None,
                shoot: None,
                chat: Some(to_f64(pr.shift)),
            },
        }
    }

    /// Rebuilds a profile from its record; derived constants (shooting
    /// constant, classification constants) are recomputed from the primary
    /// parameters, so a round trip reproduces them bit-for-bit.
    pub fn from_record(record: &ProfileRecord) -> Result<Self, ProfileError> {
        let ell = Ellipticity::new(real::<F>(record.lambda), real::<F>(record.big_lambda))?;
        match record.family {
            ProfileFamily::Lowp => {
                let boundary = real::<F>(record.boundary.unwrap_or(f64::NAN));
                let limit = real::<F>(record.limit.unwrap_or(f64::NAN));
                Profile::low_p(real(record.p), boundary, limit, record.kind, ell)
            }
            ProfileFamily::Highp => {
                Profile::high_p(real(record.p), real(record.chat.unwrap_or(f64::NAN)), record.kind, ell)
            }
        }
    }
}

impl<F: Real> LowPProfile<F> {
    pub fn p(&self) -> F {
        self.p
    }

    pub fn boundary(&self) -> F {
        self.boundary
    }

    pub fn limit(&self) -> F {
        self.limit
    }

    pub fn kappa(&self) -> F {
        self.kappa
    }

    /// Shooting constant C; `None` for the constant profile.
    pub fn shoot(&self) -> Option<F> {
        self.shoot
    }

    pub fn is_constant(&self) -> bool {
        self.shoot.is_none()
    }

    fn exponents(&self) -> (F, F) {
        let m = F::one() / (self.p - F::one());
        let a = (self.p - F::one()) / self.kappa;
        (m, a)
    }

    /// Coefficient K of the tail expansion u(y) − l = K·(y+C)^{−(2−p)/(p−1)};
    /// also the sharp constant of the decay bound u(y) − l ≤ K·y^{−(2−p)/(p−1)}.
    pub fn tail_coefficient(&self) -> F {
        match self.shoot {
            None => F::zero(),
            Some(_) => {
                let (m, a) = self.exponents();
                a.powf(-m) / (m - F::one())
            }
        }
    }

    fn value_unchecked(&self, y: F) -> F {
        match self.shoot {
            None => self.boundary,
            Some(c) => {
                let (m, _) = self.exponents();
                self.limit + self.tail_coefficient() * (y + c).powf(F::one() - m)
            }
        }
    }

    fn eval_unchecked(&self, y: F) -> (F, F, F) {
        match self.shoot {
            None => (self.boundary, F::zero(), F::zero()),
            Some(c) => {
                let (m, a) = self.exponents();
                let u = self.value_unchecked(y);
                let du = -(a * (y + c)).powf(-m);
                let d2u = m * a.powf(-m) * (y + c).powf(-m - F::one());
                (u, du, d2u)
            }
        }
    }
}

impl<F: Real> HighPProfile<F> {
    pub fn p(&self) -> F {
        self.p
    }

    pub fn shift(&self) -> F {
        self.shift
    }

    pub fn kappa(&self) -> F {
        self.kappa
    }

    pub fn c_p(&self) -> F {
        self.c_p
    }

    pub fn c_full(&self) -> F {
        self.c_full
    }

    fn value_unchecked(&self, y: F) -> F {
        if self.c_p == F::zero() {
            return F::zero();
        }
        let alpha = (self.p - real(2.0)) / (self.p - F::one());
        self.c_full * ((y + self.shift).powf(alpha) - self.shift.powf(alpha))
    }

    fn eval_unchecked(&self, y: F) -> (F, F, F) {
        if self.c_p == F::zero() {
            return (F::zero(), F::zero(), F::zero());
        }
        let u = self.value_unchecked(y);
        let t = y + self.shift;
        let inv = F::one() / (self.p - F::one());
        let du = self.c_p * t.powf(-inv);
        let d2u = -self.c_p * inv * t.powf(-self.p * inv);
        (u, du, d2u)
    }
}

/// Residual of the profile ODE −M±(diag(u″, 0, …, 0)) + s·|u′|^p at height y,
/// with the Hessian embedded in dimension `dim`.  The kind/ellipticity need
/// not match the profile's own (the residual simply will not vanish then).
pub fn ode_residual<F: Real>(
    profile: &Profile<F>,
    y: F,
    kind: OperatorKind,
    ell: &Ellipticity<F>,
    sign: HamiltonianSign,
    dim: usize,
) -> Result<F, ProfileError> {
    if dim == 0 {
        return Err(ProfileError::ZeroDim);
    }
    let (_, du, d2u) = profile.eval(y)?;
    let hessian = SymmetricMatrix::embed_1d(d2u, dim).map_err(PucciError::from)?;
    let operator = pucci_eval(kind, ell, &hessian)?;
    Ok(-operator + sign.factor::<F>() * du.abs().powf(profile.p()))
}

/// Sharp gradient envelope c_p·d^{−1/(p−1)} at distance d > 0 from the
/// boundary, for the high-p exponent range.
pub fn bernstein_envelope<F: Real>(p: F, ell: &Ellipticity<F>, kind: OperatorKind, d: F) -> Result<F, ProfileError> {
    if !(d > F::zero()) {
        return Err(ProfileError::NonPositiveDistance { d: to_f64(d) });
    }
    let (c_p, _) = classification_constant(p, ell, kind)?;
    Ok(c_p * d.powf(-F::one() / (p - F::one())))
}

/// Gap to the limit and its sharp algebraic bound for a low-p profile:
/// returns (u(y) − l, K·y^{−(2−p)/(p−1)}) with K the tail coefficient.
/// The gap never exceeds the bound, and their ratio tends to 1 as y → ∞.
pub fn limit_rate_bound<F: Real>(profile: &Profile<F>, y: F) -> Result<(F, F), ProfileError> {
    let pr = profile.as_low_p()?;
    if !(y > F::zero()) {
        return Err(ProfileError::NonPositiveDistance { d: to_f64(y) });
    }
    let gap = pr.value_unchecked(y) - pr.limit;
    let rate = (real::<F>(2.0) - pr.p) / (pr.p - F::one());
    let bound = pr.tail_coefficient() * y.powf(-rate);
    Ok((gap, bound))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileFamily {
    Lowp,
    Highp,
}

/// Flat serialization record for either family.  Fields that do not apply to
/// a family are omitted; the shooting constant is carried for consumers but
/// recomputed on ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub family: ProfileFamily,
    pub p: f64,
    pub lambda: f64,
    #[serde(rename = "Lambda")]
    pub big_lambda: f64,
    pub kind: OperatorKind,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none", default)]
    pub boundary: Option<f64>,
    #[serde(rename = "l", skip_serializing_if = "Option::is_none", default)]
    pub limit: Option<f64>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none", default)]
    pub shoot: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chat: Option<f64>,
}
