use std::collections::HashSet;

use super::{ChannelError, ChannelKind, JumpChannel};

/// What a trigger does when one of its watched detectors clicks.
#[derive(Debug, Clone, PartialEq)]
pub enum ReconfigAction {
    /// Pull the BS out: deactivate the entangling ports and reactivate the
    /// constituent local ports (by channel id).
    RemoveBs { entangling: Vec<String>, restore: Vec<String> },
    Deactivate(Vec<String>),
    /// End the current stage right after this click.
    StageAdvance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconfigRule {
    pub watch: Vec<String>,
    pub action: ReconfigAction,
    pub once: bool,
}

/// A complete detection network for one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalLayout {
    n_qubits: usize,
    channels: Vec<JumpChannel>,
    triggers: Vec<ReconfigRule>,
}

impl OpticalLayout {
    pub fn new(
        n_qubits: usize,
        channels: Vec<JumpChannel>,
        triggers: Vec<ReconfigRule>,
    ) -> Result<Self, ChannelError> {
        let mut ids = HashSet::new();
        let mut detectors = HashSet::new();
        for ch in &channels {
            if ch.n_qubits() != n_qubits {
                return Err(ChannelError::Config(format!(
                    "channel {} acts on {} qubits, layout has {n_qubits}",
                    ch.id,
                    ch.n_qubits()
                )));
            }
            if !ids.insert(ch.id.as_str()) {
                return Err(ChannelError::Config(format!("duplicate channel id {}", ch.id)));
            }
            if !detectors.insert(ch.detector.as_str()) {
                return Err(ChannelError::Config(format!("duplicate detector label {}", ch.detector)));
            }
        }
        for rule in &triggers {
            for w in &rule.watch {
                if !detectors.contains(w.as_str()) {
                    return Err(ChannelError::Config(format!("trigger watches unknown detector {w}")));
                }
            }
            let refs: Vec<&String> = match &rule.action {
                ReconfigAction::RemoveBs { entangling, restore } => {
                    for id in entangling {
                        match channels.iter().find(|c| &c.id == id) {
                            Some(c) if c.kind == ChannelKind::Entangle => {}
                            Some(_) => {
                                return Err(ChannelError::Config(format!(
                                    "REMOVE_BS target {id} is not an entangling channel"
                                )))
                            }
                            None => {}
                        }
                    }
                    entangling.iter().chain(restore).collect()
                }
                ReconfigAction::Deactivate(list) => list.iter().collect(),
                ReconfigAction::StageAdvance => Vec::new(),
            };
            for id in refs {
                if !ids.contains(id.as_str()) {
                    return Err(ChannelError::Config(format!("trigger references unknown channel {id}")));
                }
            }
        }
        Ok(Self { n_qubits, channels, triggers })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    pub fn triggers(&self) -> &[ReconfigRule] {
        &self.triggers
    }

    pub fn channel(&self, id: &str) -> Option<&JumpChannel> {
        self.channels.iter().find(|c| c.id == id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    pub fn active(&self) -> impl Iterator<Item = &JumpChannel> {
        self.channels.iter().filter(|c| c.active)
    }
}
