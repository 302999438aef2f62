//! Registry client: paginated model listing and per-model card download.
//!
//! Listing follows the registry's `Link: <...>; rel="next"` pagination. After
//! every page the caller receives a [`ResumeToken`] naming the next page, so a
//! run that aborts can restart without refetching completed pages. All
//! requests from one client share a single rate limiter.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PAGE_SIZE: usize = 1000;
pub const DEFAULT_TOKEN_ENV: &str = "HF_TOKEN";

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub base_url: String,
    pub token: Option<String>,
    /// Ceiling on request starts per second, shared by all workers.
    pub requests_per_second: f64,
    pub page_size: usize,
    pub max_retries: u32,
    pub backoff_base: Duration,
    pub backoff_cap: Duration,
    pub workers: usize,
    pub timeout: Duration,
    /// Path of the list endpoint, appended to `base_url`.
    pub list_path: String,
    /// Card URL path template; `{id}` is replaced by the model id.
    pub card_path: String,
}

impl FetchConfig {
    pub fn new(base_url: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            token: None,
            requests_per_second: 5.0,
            page_size: DEFAULT_PAGE_SIZE,
            max_retries: 5,
            backoff_base: Duration::from_millis(500),
            backoff_cap: Duration::from_secs(60),
            workers: 4,
            timeout: Duration::from_secs(120),
            list_path: "/api/models".into(),
            card_path: "/{id}/raw/main/README.md".into(),
        }
    }

    /// Read the bearer token from `var`, if set and non-empty.
    pub fn with_token_from_env(mut self, var: &str) -> Self {
        self.token = std::env::var(var).ok().filter(|t| !t.is_empty());
        self
    }

    fn first_page_url(&self) -> String {
        format!("{}{}?limit={}&full=true", self.base_url, self.list_path, self.page_size)
    }

    fn card_url(&self, model_id: &str) -> String {
        format!("{}{}", self.base_url, self.card_path.replace("{id}", model_id))
    }

    fn validate(&self) -> Result<()> {
        if self.requests_per_second.is_nan() || self.requests_per_second <= 0.0 {
            return Err(Error::Config("requests_per_second must be positive".into()));
        }
        if self.page_size == 0 || self.workers == 0 {
            return Err(Error::Config("page_size and workers must be positive".into()));
        }
        Ok(())
    }
}

/// Position in a paginated listing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResumeToken {
    /// URL of the next page to request; `None` once the listing is exhausted.
    pub next_url: Option<String>,
    pub pages_done: u64,
    pub records_done: u64,
}

impl ResumeToken {
    pub fn is_terminal(&self) -> bool {
        self.next_url.is_none()
    }
}

/// Paces request starts to at most `rate` per second.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next_slot: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(rate: f64) -> Self {
        Self { interval: Duration::from_secs_f64(1.0 / rate), next_slot: Mutex::new(None) }
    }

    pub fn acquire(&self) {
        let slot = {
            let mut next = self.next_slot.lock().expect("rate limiter poisoned");
            let now = Instant::now();
            let slot = match *next {
                Some(t) if t > now => t,
                _ => now,
            };
            *next = Some(slot + self.interval);
            slot
        };
        let now = Instant::now();
        if slot > now {
            thread::sleep(slot - now);
        }
    }
}

struct HttpResponse {
    status: u16,
    next_link: Option<String>,
    body: String,
}

enum Attempt {
    Done(HttpResponse),
    Fatal(Error),
    Exhausted(String),
}

pub struct RegistryClient {
    config: FetchConfig,
    agent: ureq::Agent,
    limiter: RateLimiter,
}

fn parse_next_link(header: &str) -> Option<String> {
    header.split(',').find_map(|part| {
        let (url, params) = part.split_once(';')?;
        let is_next = params.split(';').any(|p| matches!(p.trim(), "rel=\"next\"" | "rel=next"));
        is_next.then(|| url.trim().trim_start_matches('<').trim_end_matches('>').to_string())
    })
}

impl RegistryClient {
    pub fn new(config: FetchConfig) -> Result<Self> {
        config.validate()?;
        let agent: ureq::Agent =
            ureq::Agent::config_builder().http_status_as_error(false).timeout_global(Some(config.timeout)).build().into();
        let limiter = RateLimiter::new(config.requests_per_second);
        Ok(Self { config, agent, limiter })
    }

    pub fn config(&self) -> &FetchConfig {
        &self.config
    }

    fn absolute(&self, link: String) -> String {
        if link.starts_with("http://") || link.starts_with("https://") {
            link
        } else {
            format!("{}/{}", self.config.base_url, link.trim_start_matches('/'))
        }
    }

    fn get_once(&self, url: &str) -> std::result::Result<HttpResponse, String> {
        self.limiter.acquire();
        let mut req = self.agent.get(url);
        if let Some(token) = &self.config.token {
            req = req.header("Authorization", &format!("Bearer {token}"));
        }
        let mut resp = req.call().map_err(|e| e.to_string())?;
        let status = resp.status().as_u16();
        let next_link = resp.headers().get("link").and_then(|v| v.to_str().ok()).and_then(parse_next_link);
        let body = if status == 200 {
            resp.body_mut().with_config().limit(1 << 30).read_to_string().map_err(|e| e.to_string())?
        } else {
            String::new()
        };
        Ok(HttpResponse { status, next_link, body })
    }

    /// GET with bounded exponential backoff on transport errors, 429 and 5xx.
    /// 404 is returned to the caller; 401/403 are fatal.
    fn get(&self, url: &str) -> Attempt {
        let mut delay = self.config.backoff_base;
        let mut attempt = 0;
        loop {
            let failure = match self.get_once(url) {
                Ok(resp) if resp.status == 401 || resp.status == 403 => {
                    return Attempt::Fatal(Error::Auth { status: resp.status, url: url.to_string() })
                }
                Ok(resp) if resp.status == 429 || resp.status >= 500 => format!("HTTP {}", resp.status),
                Ok(resp) => return Attempt::Done(resp),
                Err(e) => e,
            };
            if attempt >= self.config.max_retries {
                return Attempt::Exhausted(format!("{url}: {failure} after {} attempts", attempt + 1));
            }
            warn!("{url}: {failure}; retrying in {delay:?}");
            thread::sleep(delay);
            delay = (delay * 2).min(self.config.backoff_cap);
            attempt += 1;
        }
    }

    /// Walk the listing from `resume` (or the first page), handing each page
    /// of raw record objects to `on_page` together with the token that resumes
    /// after it. Returns the final token, which is terminal on success.
    pub fn fetch_snapshot<F>(&self, resume: Option<ResumeToken>, mut on_page: F) -> Result<ResumeToken>
    where
        F: FnMut(Vec<serde_json::Value>, &ResumeToken) -> Result<()>,
    {
        let mut token =
            resume.unwrap_or_else(|| ResumeToken { next_url: Some(self.config.first_page_url()), pages_done: 0, records_done: 0 });
        while let Some(url) = token.next_url.clone() {
            let resp = match self.get(&url) {
                Attempt::Done(r) => r,
                Attempt::Fatal(e) => return Err(e),
                Attempt::Exhausted(reason) => return Err(Error::FetchAborted { reason, resume_token: token }),
            };
            if resp.status != 200 {
                return Err(Error::FetchAborted { reason: format!("{url}: unexpected HTTP {}", resp.status), resume_token: token });
            }
            let page: Vec<serde_json::Value> = serde_json::from_str(&resp.body)?;
            debug!("page {} from {url}: {} records", token.pages_done + 1, page.len());
            let next = ResumeToken {
                next_url: resp.next_link.map(|l| self.absolute(l)),
                pages_done: token.pages_done + 1,
                records_done: token.records_done + page.len() as u64,
            };
            on_page(page, &next)?;
            token = next;
        }
        Ok(token)
    }

    /// Download cards for `model_ids` with a bounded worker pool.
    ///
    /// Duplicate ids are requested once. A 404 records the card as absent. If
    /// a request exhausts its retries the pool stops taking new ids; finished
    /// results are kept and the unfinished ids are listed in
    /// [`CardFetch::pending`].
    pub fn fetch_cards<S: AsRef<str>>(&self, model_ids: &[S]) -> Result<CardFetch> {
        let ids: Vec<&str> = model_ids.iter().map(AsRef::as_ref).collect::<BTreeSet<_>>().into_iter().collect();
        let next = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);
        let results: Mutex<BTreeMap<String, Option<String>>> = Mutex::new(BTreeMap::new());
        let failure: Mutex<Option<Error>> = Mutex::new(None);
        let abort_reason: Mutex<Option<String>> = Mutex::new(None);

        thread::scope(|scope| {
            for _ in 0..self.config.workers.min(ids.len().max(1)) {
                scope.spawn(|| loop {
                    if stop.load(Ordering::SeqCst) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(id) = ids.get(i) else { break };
                    let card = match self.get(&self.config.card_url(id)) {
                        Attempt::Done(r) if r.status == 200 => Some(r.body),
                        Attempt::Done(r) if r.status == 404 => None,
                        Attempt::Done(r) => {
                            warn!("{id}: unexpected HTTP {}; treating card as absent", r.status);
                            None
                        }
                        Attempt::Fatal(e) => {
                            stop.store(true, Ordering::SeqCst);
                            failure.lock().unwrap().get_or_insert(e);
                            break;
                        }
                        Attempt::Exhausted(reason) => {
                            stop.store(true, Ordering::SeqCst);
                            abort_reason.lock().unwrap().get_or_insert(reason);
                            break;
                        }
                    };
                    results.lock().unwrap().insert(id.to_string(), card);
                });
            }
        });

        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        let cards = results.into_inner().unwrap();
        let pending = ids.iter().filter(|id| !cards.contains_key(**id)).map(|id| id.to_string()).collect();
        Ok(CardFetch { cards, pending, aborted: abort_reason.into_inner().unwrap() })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CardFetch {
    /// Card text per requested id; `None` means the registry has no card.
    pub cards: BTreeMap<String, Option<String>>,
    /// Ids not fetched because the run aborted.
    pub pending: Vec<String>,
    pub aborted: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn link_header_next_is_extracted() {
        let h = r#"<https://hub/api/models?cursor=abc&limit=1000>; rel="next""#;
        assert_eq!(parse_next_link(h).as_deref(), Some("https://hub/api/models?cursor=abc&limit=1000"));
        let both = r#"<https://a/prev>; rel="prev", <https://a/next>; rel="next""#;
        assert_eq!(parse_next_link(both).as_deref(), Some("https://a/next"));
        assert_eq!(parse_next_link(r#"<https://a/prev>; rel="prev""#), None);
    }

    #[test]
    fn limiter_spaces_requests() {
        let limiter = RateLimiter::new(50.0);
        let start = Instant::now();
        for _ in 0..6 {
            limiter.acquire();
        }
        assert!(start.elapsed() >= Duration::from_millis(95));
    }

    #[test]
    fn bad_config_is_rejected() {
        let mut cfg = FetchConfig::new("http://localhost");
        cfg.requests_per_second = 0.0;
        assert!(matches!(RegistryClient::new(cfg), Err(Error::Config(_))));
    }
}
