#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use qx_core::generation::{CandidateSource, GenerationError, GenerationRequest, Generator};
use qx_core::session::{Clock, LogError, QueryEvent, QueryLog, QuerySource};

/// Ticks one millisecond per reading.
#[derive(Default)]
pub struct TickClock(AtomicU64);

impl Clock for TickClock {
    fn now_ms(&self) -> u64 {
        self.0.fetch_add(1, Ordering::SeqCst) + 1
    }
}

#[derive(Default)]
pub struct MemoryLog {
    pub events: Mutex<Vec<QueryEvent>>,
    clock: TickClock,
}

impl MemoryLog {
    pub fn len(&self) -> usize {
        self.events.lock().unwrap().len()
    }

    pub fn snapshot(&self) -> Vec<QueryEvent> {
        self.events.lock().unwrap().clone()
    }
}

impl QueryLog for MemoryLog {
    fn on_query_change(
        &self,
        session_id: &str,
        log_name: &str,
        previous_query: Option<&str>,
        query: &str,
        source: QuerySource,
    ) -> Result<QueryEvent, LogError> {
        let event = QueryEvent {
            session_id: session_id.into(),
            timestamp_ms: self.clock.now_ms(),
            previous_query: previous_query.map(String::from),
            query: query.into(),
            source,
            log_name: log_name.into(),
        };
        self.events.lock().unwrap().push(event.clone());
        Ok(event)
    }
}

/// Returns the same canned candidates for every request and remembers the
/// prompts it saw.
pub struct Canned {
    pub outputs: Vec<String>,
    pub prompts: Mutex<Vec<String>>,
}

impl Canned {
    pub fn new(outputs: &[&str]) -> Self {
        Self { outputs: outputs.iter().map(|s| s.to_string()).collect(), prompts: Mutex::default() }
    }
}

impl Generator for Canned {
    fn generate(&self, req: &GenerationRequest<'_>) -> Result<Vec<String>, GenerationError> {
        self.prompts.lock().unwrap().push(req.prompt.to_string());
        Ok(self.outputs.clone())
    }

    fn source(&self) -> CandidateSource {
        CandidateSource::Generator
    }
}

pub struct Failing;

impl Generator for Failing {
    fn generate(&self, _: &GenerationRequest<'_>) -> Result<Vec<String>, GenerationError> {
        Err(GenerationError::Transport { attempts: 3, detail: "connection refused".into() })
    }

    fn source(&self) -> CandidateSource {
        CandidateSource::Generator
    }
}

/// Five short cricket-themed documents plus unrelated filler.
pub const CRICKET_CORPUS: &[(&str, &str)] = &[
    ("c1", "Cricket is a bat and ball game played between two teams of eleven players. The bowler delivers the ball to the batsman at the wicket."),
    ("c2", "A test match of cricket lasts five days and each team bats for two innings. Rain can stop play."),
    ("c3", "The wicket keeper stands behind the stumps and catches the ball when the batsman misses."),
    ("c4", "Baseball is a bat and ball game in which the pitcher throws to the batter at home plate."),
    ("c5", "Tennis is played with a racket and a ball on a court divided by a net."),
    ("g1", "The garden needs water and sunlight for the tomato plants to grow."),
    ("g2", "Solar power panels convert sunlight into electricity for the home."),
    ("g3", "A game of chess has two players who move pieces on a board."),
];
