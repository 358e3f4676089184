use axum::extract::State;
use axum::http::StatusCode;
use axum::Json;
use serde::Deserialize;
use stageseat_core::admin::{self, AdminError, UserUpdate};
use stageseat_core::booking::balance_of;
use stageseat_core::{Policy, Preferences, Role, UserAccount};

use crate::auth::{hash_password, verify_password, MIN_PASSWORD_LEN};
use crate::error::ApiError;
use crate::extract::{ApiJson, Authed};
use crate::state::AppState;
use crate::views::{CoinsView, LoginResponse, UserView};

#[derive(Debug, Deserialize)]
pub struct RegisterRequest {
    pub username: String,
    pub email: String,
    pub password: String,
}

#[derive(Debug, Deserialize)]
pub struct LoginRequest {
    pub username: String,
    pub password: String,
}

#[derive(Debug, Deserialize)]
pub struct ProfileUpdate {
    pub email: Option<String>,
    pub preferences: Option<Preferences>,
}

fn check_username(name: &str) -> Result<(), ApiError> {
    let ok = (3..=32).contains(&name.chars().count())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c));
    if ok {
        Ok(())
    } else {
        Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "InvalidUsername",
            "username must be 3-32 characters of letters, digits, '_', '-' or '.'",
        ))
    }
}

pub(crate) fn check_email(email: &str) -> Result<(), ApiError> {
    let ok = match email.split_once('@') {
        Some((local, domain)) => {
            !local.is_empty() && !domain.is_empty() && !domain.contains('@') && !email.chars().any(char::is_whitespace)
        }
        None => false,
    };
    if ok {
        Ok(())
    } else {
        Err(ApiError::new(StatusCode::BAD_REQUEST, "InvalidEmail", "email address is malformed"))
    }
}

async fn digest(password: String, iterations: u32) -> Result<String, ApiError> {
    tokio::task::spawn_blocking(move || hash_password(&password, iterations))
        .await
        .map_err(ApiError::internal)
}

pub async fn register(
    State(state): State<AppState>,
    ApiJson(req): ApiJson<RegisterRequest>,
) -> Result<(StatusCode, Json<UserView>), ApiError> {
    check_username(&req.username)?;
    check_email(&req.email)?;
    if req.password.chars().count() < MIN_PASSWORD_LEN {
        return Err(ApiError::new(
            StatusCode::BAD_REQUEST,
            "WeakPassword",
            format!("password must be at least {MIN_PASSWORD_LEN} characters"),
        ));
    }
    let taken = state.store.read(|t| {
        t.users.values().any(|u| u.username == req.username)
    });
    if taken {
        return Err(AdminError::Duplicate("username").into());
    }
    let digest = digest(req.password, state.pbkdf2_iterations).await?;
    let user = admin::insert_user(&state.store, &req.username, &req.email, digest, Role::User, state.clock.now())?;
    Ok((StatusCode::CREATED, Json(UserView::from(&user))))
}

pub async fn login(
    State(state): State<AppState>,
    ApiJson(req): ApiJson<LoginRequest>,
) -> Result<Json<LoginResponse>, ApiError> {
    let user: Option<UserAccount> = state
        .store
        .read(|t| t.users.values().find(|u| u.username == req.username).cloned());
    let stored = user
        .as_ref()
        .map_or_else(|| state.decoy_digest.clone(), |u| u.password_digest.clone());
    let password = req.password;
    let matches = tokio::task::spawn_blocking(move || verify_password(&password, &stored))
        .await
        .map_err(ApiError::internal)?;
    let user = match user {
        Some(u) if matches => u,
        _ => {
            return Err(ApiError::new(
                StatusCode::UNAUTHORIZED,
                "InvalidCredentials",
                "username or password is incorrect",
            ))
        }
    };
    let session = state
        .sessions
        .issue(user.user_id, user.role, state.clock.now(), state.session_ttl_hours);
    Ok(Json(LoginResponse {
        token: session.token,
        expires_at: session.expires_at,
        user: UserView::from(&user),
    }))
}

pub async fn policy(State(state): State<AppState>) -> Json<Policy> {
    Json(state.policy.clone())
}

pub async fn profile(State(state): State<AppState>, Authed(s): Authed) -> Result<Json<UserView>, ApiError> {
    state
        .store
        .read(|t| t.users.get(&s.user_id).map(UserView::from))
        .map(Json)
        .ok_or_else(ApiError::unauthorized)
}

pub async fn update_profile(
    State(state): State<AppState>,
    Authed(s): Authed,
    ApiJson(req): ApiJson<ProfileUpdate>,
) -> Result<Json<UserView>, ApiError> {
    if let Some(e) = &req.email {
        check_email(e)?;
    }
    let update = UserUpdate {
        email: req.email,
        role: None,
        preferences: req.preferences,
    };
    let user = admin::update_user(&state.store, s.user_id, update)?;
    Ok(Json(UserView::from(&user)))
}

pub async fn coins(State(state): State<AppState>, Authed(s): Authed) -> Json<CoinsView> {
    state.store.read(|t| {
        let mut transactions: Vec<_> = t.ledger.values().filter(|e| e.user_id == s.user_id).cloned().collect();
        transactions.sort_by_key(|e| std::cmp::Reverse(e.txn_id));
        Json(CoinsView {
            balance: balance_of(t, s.user_id),
            transactions,
        })
    })
}
