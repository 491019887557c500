use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use emoji_encoder::{ChartSpec, Dataset, EncodingPlan};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

/// One author's working state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub dataset: Dataset,
    pub plan: EncodingPlan,
    pub spec: Option<ChartSpec>,
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub updated: u64,
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or_default()
}

impl Session {
    pub fn new(dataset: Dataset, plan: EncodingPlan) -> Self {
        let t = now();
        Self {
            id: uuid::Uuid::new_v4().simple().to_string(),
            dataset,
            plan,
            spec: None,
            created: t,
            updated: t,
        }
    }

    pub fn touch(&mut self) {
        self.updated = now();
    }
}

/// In-memory session registry. Each session has its own lock: writes to one
/// session are serialized while reads proceed concurrently.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<RwLock<Session>>>>,
}

impl SessionStore {
    pub async fn insert(&self, session: Session) -> String {
        let id = session.id.clone();
        self.sessions
            .write()
            .await
            .insert(id.clone(), Arc::new(RwLock::new(session)));
        id
    }

    pub async fn get(&self, id: &str) -> Option<Arc<RwLock<Session>>> {
        self.sessions.read().await.get(id).cloned()
    }

    pub async fn len(&self) -> usize {
        self.sessions.read().await.len()
    }

    pub async fn is_empty(&self) -> bool {
        self.len().await == 0
    }

    /// Copies every session, ordered by creation time then id.
    pub async fn snapshot(&self) -> Vec<Session> {
        let handles: Vec<_> = self.sessions.read().await.values().cloned().collect();
        let mut out = Vec::with_capacity(handles.len());
        for h in handles {
            out.push(h.read().await.clone());
        }
        out.sort_by(|a, b| a.created.cmp(&b.created).then_with(|| a.id.cmp(&b.id)));
        out
    }

    pub async fn write_snapshot(&self, path: &Path) -> std::io::Result<()> {
        let sessions = self.snapshot().await;
        let json = serde_json::to_vec(&sessions).map_err(std::io::Error::other)?;
        std::fs::write(path, json)
    }

    pub async fn restore(&self, path: &Path) -> std::io::Result<usize> {
        let bytes = std::fs::read(path)?;
        let sessions: Vec<Session> = serde_json::from_slice(&bytes).map_err(std::io::Error::other)?;
        let n = sessions.len();
        for s in sessions {
            self.insert(s).await;
        }
        Ok(n)
    }
}
