//! In-memory session registry shared by the HTTP service.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock, TryLockError};

use serde::{Deserialize, Serialize};

use crate::belief::Belief;
use crate::emr::EmrRecord;
use crate::error::{Error, Result};
use crate::extraction::DialogueTurn;
use crate::model::CurrentState;
use crate::pack::{CaseSpec, ScenarioPack};
use crate::planner::{PolicyKind, Session, SessionStatus, TurnTrace};
use crate::retrieval::KnowledgeBase;

/// What a second post does while a turn is in flight on the same session.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BusyPolicy {
    #[default]
    Queue,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub scenario_id: String,
    pub family: String,
    pub title: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub session_id: String,
    pub scenario_id: String,
    pub policy: PolicyKind,
    pub status: SessionStatus,
    pub turns: usize,
    pub state_hash: String,
    pub state: CurrentState,
    pub belief: Belief,
}

pub struct SessionManager {
    pack: Arc<ScenarioPack>,
    kb: Arc<KnowledgeBase>,
    cases: BTreeMap<String, Arc<CaseSpec>>,
    sessions: RwLock<BTreeMap<String, Arc<Mutex<Session>>>>,
    counter: AtomicU64,
    busy: BusyPolicy,
    persist_dir: Option<PathBuf>,
}

impl SessionManager {
    pub fn new(pack: Arc<ScenarioPack>, kb: Arc<KnowledgeBase>) -> Result<Self> {
        let cases = pack
            .scenarios
            .keys()
            .map(|id| Ok((id.clone(), Arc::new(pack.case(id)?))))
            .collect::<Result<_>>()?;
        Ok(Self {
            pack,
            kb,
            cases,
            sessions: RwLock::new(BTreeMap::new()),
            counter: AtomicU64::new(0),
            busy: BusyPolicy::Queue,
            persist_dir: None,
        })
    }

    pub fn with_busy_policy(mut self, busy: BusyPolicy) -> Self {
        self.busy = busy;
        self
    }

    /// Append every trace to `<dir>/<session_id>.jsonl` as it is produced.
    pub fn with_persistence(mut self, dir: PathBuf) -> Self {
        self.persist_dir = Some(dir);
        self
    }

    pub fn pack(&self) -> &ScenarioPack {
        &self.pack
    }

    pub fn scenarios(&self) -> Vec<ScenarioInfo> {
        self.pack
            .scenarios
            .values()
            .map(|s| ScenarioInfo {
                scenario_id: s.scenario_id.clone(),
                family: s.family.clone(),
                title: s.title.clone(),
            })
            .collect()
    }

    pub fn create(&self, scenario_id: &str, policy: PolicyKind) -> Result<String> {
        let case = self
            .cases
            .get(scenario_id)
            .ok_or_else(|| Error::UnknownScenario(scenario_id.to_owned()))?;
        let mut session = Session::new(Arc::clone(case), Arc::clone(&self.kb), policy)?;
        let id = format!("s{:04}", self.counter.fetch_add(1, Ordering::SeqCst) + 1);
        session.id = id.clone();
        self.sessions
            .write()
            .expect("session registry poisoned")
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(id)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>> {
        self.sessions
            .read()
            .expect("session registry poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| Error::UnknownSession(id.to_owned()))
    }

    fn read<T>(&self, id: &str, f: impl FnOnce(&Session) -> T) -> Result<T> {
        let s = self.get(id)?;
        let guard = s.lock().expect("session poisoned");
        Ok(f(&guard))
    }

    /// Run one turn. Turns on one session are serialized; under
    /// [`BusyPolicy::Reject`] a concurrent post fails with `SessionBusy`.
    pub fn post(&self, id: &str, turn: DialogueTurn) -> Result<(TurnTrace, SessionStatus)> {
        let s = self.get(id)?;
        let mut guard = match self.busy {
            BusyPolicy::Queue => s.lock().expect("session poisoned"),
            BusyPolicy::Reject => match s.try_lock() {
                Ok(g) => g,
                Err(TryLockError::WouldBlock) => return Err(Error::SessionBusy(id.to_owned())),
                Err(TryLockError::Poisoned(_)) => panic!("session poisoned"),
            },
        };
        let trace = guard.run_turn(turn)?.clone();
        if let Some(dir) = &self.persist_dir {
            let path = dir.join(format!("{id}.jsonl"));
            append_line(&path, &serde_json::to_string(&trace).expect("serializable trace"))?;
        }
        Ok((trace, guard.status))
    }

    pub fn state(&self, id: &str) -> Result<StateView> {
        self.read(id, |s| StateView {
            session_id: s.id.clone(),
            scenario_id: s.case.scenario.scenario_id.clone(),
            policy: s.policy,
            status: s.status,
            turns: s.traces.len(),
            state_hash: s.state_hash(),
            state: s.state.clone(),
            belief: s.belief.clone(),
        })
    }

    pub fn emr(&self, id: &str) -> Result<EmrRecord> {
        self.read(id, |s| s.record.clone())
    }

    pub fn trace(&self, id: &str) -> Result<Vec<TurnTrace>> {
        self.read(id, |s| s.traces.clone())
    }
}

fn append_line(path: &std::path::Path, line: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io_err)?;
    writeln!(f, "{line}").map_err(io_err)
}
