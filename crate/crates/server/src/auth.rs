//! Salted PBKDF2 password digests and bearer-token sessions.

use std::collections::HashMap;

use base64::engine::general_purpose::{STANDARD_NO_PAD, URL_SAFE_NO_PAD};
use base64::Engine;
use parking_lot::Mutex;
use rand::rngs::OsRng;
use rand::RngCore;
use serde::Serialize;
use sha2::Sha256;
use stageseat_core::{Role, Timestamp, UserId};
use subtle::ConstantTimeEq;

const SCHEME: &str = "pbkdf2-sha256";
const SALT_LEN: usize = 16;
const HASH_LEN: usize = 32;
const TOKEN_BYTES: usize = 32;
pub const MIN_PASSWORD_LEN: usize = 8;

/// `pbkdf2-sha256$<iterations>$<salt>$<hash>` with unpadded base64 fields.
pub fn hash_password(password: &str, iterations: u32) -> String {
    let mut salt = [0u8; SALT_LEN];
    OsRng.fill_bytes(&mut salt);
    let mut out = [0u8; HASH_LEN];
    pbkdf2::pbkdf2_hmac::<Sha256>(password.as_bytes(), &salt, iterations, &mut out);
    format!(
        "{SCHEME}${iterations}${}${}",
        STANDARD_NO_PAD.encode(salt),
        STANDARD_NO_PAD.encode(out)
    )
}

/// Constant-time check of `password` against a stored digest. Malformed
/// digests never verify.
pub fn verify_password(password: &str, digest: &str) -> bool {
    let mut parts = digest.split('$');
    let (Some(SCHEME), Some(iters), Some(salt), Some(hash), None) =
        (parts.next(), parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return false;
    };
    let (Ok(iters), Ok(salt), Ok(expected)) = (
        iters.parse::<u32>(),
        STANDARD_NO_PAD.decode(salt),
        STANDARD_NO_PAD.decode(hash),
    ) else {
        return false;
    };
    if iters == 0 || expected.len() != HASH_LEN {
        return false;
    }
    let mut out = [0u8; HASH_LEN];
    pbkdf2::pbkdf2_hmac::<Sha256>(password.as_bytes(), &salt, iters, &mut out);
    out.ct_eq(&expected[..]).into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Session {
    pub token: String,
    pub user_id: UserId,
    pub role: Role,
    pub expires_at: Timestamp,
}

#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: Mutex<HashMap<String, Session>>,
}

impl SessionStore {
    pub fn issue(&self, user_id: UserId, role: Role, now: Timestamp, ttl_hours: i64) -> Session {
        let mut raw = [0u8; TOKEN_BYTES];
        OsRng.fill_bytes(&mut raw);
        let session = Session {
            token: URL_SAFE_NO_PAD.encode(raw),
            user_id,
            role,
            expires_at: now.plus_hours(ttl_hours),
        };
        let mut map = self.sessions.lock();
        map.retain(|_, s| s.expires_at > now);
        map.insert(session.token.clone(), session.clone());
        session
    }

    /// The live session for `token`. Expired sessions are dropped.
    pub fn lookup(&self, token: &str, now: Timestamp) -> Option<Session> {
        let mut map = self.sessions.lock();
        match map.get(token) {
            Some(s) if s.expires_at > now => Some(s.clone()),
            Some(_) => {
                map.remove(token);
                None
            }
            None => None,
        }
    }

    /// Refresh the cached role after an admin edits an account.
    pub fn set_role(&self, user_id: UserId, role: Role) {
        for s in self.sessions.lock().values_mut().filter(|s| s.user_id == user_id) {
            s.role = role;
        }
    }

    pub fn len(&self) -> usize {
        self.sessions.lock().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
