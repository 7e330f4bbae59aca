//! Reply-tree reconstruction with the jwz container algorithm, plus the
//! minimum-size thread filter and corpus summary counts.
//!
//! The algorithm: link containers along each message's References chain
//! (falling back to In-Reply-To), create dummy containers for ids that are
//! referenced but missing from the corpus, prune dummies (promoting their
//! children), then group the remaining parentless containers by normalized
//! subject. Links that would close a cycle are skipped and logged.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identity::IdentityIndex;
use crate::message::{is_reply_subject, Message, Warning};

/// A node in a reconstructed reply tree. `message` is absent only for dummy
/// containers, which after pruning appear solely as roots holding two or
/// more real children.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreadNode {
    pub msg_id: String,
    pub message: Option<Message>,
    pub children: Vec<ThreadNode>,
}

impl ThreadNode {
    pub fn is_dummy(&self) -> bool {
        self.message.is_none()
    }

    fn walk<'a>(&'a self, out: &mut Vec<&'a ThreadNode>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }
}

/// One thread: a rooted tree plus the derived facts every consumer needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Thread {
    pub root: ThreadNode,
    /// Count of real (non-dummy) messages.
    pub size: usize,
    /// Normalized subject of the root.
    pub subject: String,
    /// Earliest real message; its sender is the thread's opening author.
    pub opening_msg_id: String,
}

impl Thread {
    /// All nodes, preorder.
    pub fn nodes(&self) -> Vec<&ThreadNode> {
        let mut out = Vec::new();
        self.root.walk(&mut out);
        out
    }

    /// All real messages in the thread, preorder.
    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.nodes()
            .into_iter()
            .filter_map(|n| n.message.as_ref())
            .collect::<Vec<_>>()
            .into_iter()
    }

    pub fn find(&self, msg_id: &str) -> Option<&ThreadNode> {
        self.nodes().into_iter().find(|n| n.msg_id == msg_id)
    }

    /// The parent node of `msg_id` within this tree, if any.
    pub fn parent_of(&self, msg_id: &str) -> Option<&ThreadNode> {
        fn rec<'a>(node: &'a ThreadNode, msg_id: &str) -> Option<&'a ThreadNode> {
            for c in &node.children {
                if c.msg_id == msg_id {
                    return Some(node);
                }
                if let Some(p) = rec(c, msg_id) {
                    return Some(p);
                }
            }
            None
        }
        rec(&self.root, msg_id)
    }

    pub fn opening_message(&self) -> Option<&Message> {
        self.find(&self.opening_msg_id).and_then(|n| n.message.as_ref())
    }
}

/// Result of threading a corpus: the forest plus any cycle warnings.
#[derive(Debug, Clone)]
pub struct ThreadForest {
    pub threads: Vec<Thread>,
    pub warnings: Vec<Warning>,
}

// ---------------------------------------------------------------------------
// Container arena
// ---------------------------------------------------------------------------

struct Container {
    id: String,
    message: Option<usize>,
    parent: Option<usize>,
    children: Vec<usize>,
}

struct Arena {
    containers: Vec<Container>,
    by_id: HashMap<String, usize>,
}

impl Arena {
    fn new() -> Self {
        Arena {
            containers: Vec::new(),
            by_id: HashMap::new(),
        }
    }

    fn intern(&mut self, id: &str) -> usize {
        if let Some(&idx) = self.by_id.get(id) {
            return idx;
        }
        let idx = self.containers.len();
        self.containers.push(Container {
            id: id.to_string(),
            message: None,
            parent: None,
            children: Vec::new(),
        });
        self.by_id.insert(id.to_string(), idx);
        idx
    }

    fn is_ancestor(&self, candidate: usize, of: usize) -> bool {
        let mut cur = Some(of);
        while let Some(idx) = cur {
            if idx == candidate {
                return true;
            }
            cur = self.containers[idx].parent;
        }
        false
    }

    fn unlink(&mut self, child: usize) {
        if let Some(p) = self.containers[child].parent.take() {
            self.containers[p].children.retain(|&c| c != child);
        }
    }

    /// Link parent → child unless it would close a cycle. Returns false on a
    /// refused (cyclic) link.
    fn link(&mut self, parent: usize, child: usize) -> bool {
        if parent == child || self.is_ancestor(child, parent) {
            return false;
        }
        self.unlink(child);
        self.containers[child].parent = Some(parent);
        self.containers[parent].children.push(child);
        true
    }
}

// ---------------------------------------------------------------------------
// build_threads
// ---------------------------------------------------------------------------

/// Reconstruct the thread forest for a corpus of messages with unique ids.
pub fn build_threads(messages: &[Message]) -> ThreadForest {
    let mut arena = Arena::new();
    let mut warnings = Vec::new();

    // Pass 1: one container per message, linked along its reference chain.
    for (mi, m) in messages.iter().enumerate() {
        let idx = arena.intern(&m.msg_id);
        if arena.containers[idx].message.is_some() {
            warnings.push(Warning::new(
                "duplicate-id",
                m.msg_id.clone(),
                "duplicate msg_id reached threading; occurrence skipped",
            ));
            continue;
        }
        arena.containers[idx].message = Some(mi);

        // References chain takes precedence; In-Reply-To is the fallback.
        let chain: Vec<&str> = if m.references.is_empty() {
            m.in_reply_to.iter().map(|s| s.as_str()).collect()
        } else {
            m.references.iter().map(|s| s.as_str()).collect()
        };

        for pair in chain.windows(2) {
            if pair[0] == pair[1] {
                continue;
            }
            let a = arena.intern(pair[0]);
            let b = arena.intern(pair[1]);
            // Only link containers not yet placed; never rewire here.
            if arena.containers[b].parent.is_none() && !arena.link(a, b) {
                warnings.push(Warning::new(
                    "thread-cycle",
                    m.msg_id.clone(),
                    format!("skipped reference link {} -> {}", pair[0], pair[1]),
                ));
            }
        }

        if let Some(&last) = chain.last() {
            if last != m.msg_id {
                let parent = arena.intern(last);
                // The message's own chain trumps any earlier placement;
                // link() re-parents, refusing only cycle-closing edges.
                if !arena.link(parent, idx) {
                    warnings.push(Warning::new(
                        "thread-cycle",
                        m.msg_id.clone(),
                        format!("breaking parent link to {last}: would create a cycle"),
                    ));
                }
            }
        }
    }

    // Pass 2: root set.
    let roots: Vec<usize> = (0..arena.containers.len())
        .filter(|&i| arena.containers[i].parent.is_none())
        .collect();

    // Pass 3: prune dummy containers.
    let mut pruned_roots = Vec::new();
    for r in roots {
        pruned_roots.extend(prune(&mut arena, r, true));
    }
    for &r in &pruned_roots {
        arena.containers[r].parent = None;
    }

    // Pass 4: group the root set by subject.
    let final_roots = group_by_subject(&mut arena, pruned_roots, messages);

    // Pass 5: materialize sorted trees.
    let mut threads: Vec<Thread> = final_roots
        .into_iter()
        .map(|r| materialize(&arena, r, messages))
        .collect();
    threads.sort_by(|a, b| {
        let ka = thread_sort_key(a);
        let kb = thread_sort_key(b);
        ka.cmp(&kb)
    });

    ThreadForest { threads, warnings }
}

fn thread_sort_key(t: &Thread) -> (i64, bool, String) {
    match t.opening_message() {
        Some(m) => (m.timestamp_utc, m.is_synthetic_id(), t.root.msg_id.clone()),
        None => (i64::MAX, true, t.root.msg_id.clone()),
    }
}

/// Post-order prune. Returns the containers that take this container's place:
/// itself, its promoted children, or nothing. Spliced dummies are left
/// childless so later passes ignore them.
fn prune(arena: &mut Arena, idx: usize, at_root: bool) -> Vec<usize> {
    let children = std::mem::take(&mut arena.containers[idx].children);
    let mut kept = Vec::new();
    for c in children {
        kept.extend(prune(arena, c, false));
    }

    if arena.containers[idx].message.is_none() {
        if kept.is_empty() {
            return Vec::new();
        }
        // Splice children upward, except a dummy root keeps >= 2 children
        // together (promoting them would split one conversation into many).
        if !at_root || kept.len() == 1 {
            return kept;
        }
    }
    for &c in &kept {
        arena.containers[c].parent = Some(idx);
    }
    arena.containers[idx].children = kept;
    vec![idx]
}

/// Normalized subject used to group a root container.
fn container_subject(arena: &Arena, idx: usize, messages: &[Message]) -> String {
    if let Some(mi) = arena.containers[idx].message {
        return messages[mi].normalized_subject.clone();
    }
    for &c in &arena.containers[idx].children {
        if let Some(mi) = arena.containers[c].message {
            return messages[mi].normalized_subject.clone();
        }
    }
    String::new()
}

fn container_is_reply(arena: &Arena, idx: usize, messages: &[Message]) -> bool {
    arena.containers[idx]
        .message
        .map(|mi| is_reply_subject(&messages[mi].subject))
        .unwrap_or(false)
}

/// jwz step 5: merge root containers whose normalized subjects match.
fn group_by_subject(arena: &mut Arena, roots: Vec<usize>, messages: &[Message]) -> Vec<usize> {
    let mut table: HashMap<String, usize> = HashMap::new();

    for &r in &roots {
        let subject = container_subject(arena, r, messages);
        if subject.is_empty() {
            continue;
        }
        match table.get(&subject) {
            None => {
                table.insert(subject, r);
            }
            Some(&old) => {
                let old_dummy = arena.containers[old].message.is_none();
                let new_dummy = arena.containers[r].message.is_none();
                let prefer_new = (new_dummy && !old_dummy)
                    || (container_is_reply(arena, old, messages)
                        && !container_is_reply(arena, r, messages));
                if prefer_new {
                    table.insert(subject, r);
                }
            }
        }
    }

    let mut removed: Vec<usize> = Vec::new();
    for &r in &roots {
        let subject = container_subject(arena, r, messages);
        if subject.is_empty() {
            continue;
        }
        let target = table[&subject];
        if target == r {
            continue;
        }
        let r_dummy = arena.containers[r].message.is_none();
        let target_dummy = arena.containers[target].message.is_none();

        if r_dummy && target_dummy {
            // Fold one group container into the other.
            let children = arena.containers[r].children.clone();
            for c in children {
                arena.link(target, c);
            }
            removed.push(r);
        } else if target_dummy {
            arena.link(target, r);
        } else if r_dummy {
            // Symmetric case: the non-dummy joins the group container, which
            // then replaces it in the table.
            arena.link(r, target);
            table.insert(subject, r);
        } else {
            let r_reply = container_is_reply(arena, r, messages);
            let target_reply = container_is_reply(arena, target, messages);
            if r_reply && !target_reply {
                arena.link(target, r);
            } else if target_reply && !r_reply {
                arena.link(r, target);
                table.insert(subject, r);
            } else {
                // Both replies or both originals: join them under a fresh
                // group container.
                let group = arena.intern(&format!("subject:{subject}"));
                arena.link(group, target);
                arena.link(group, r);
                table.insert(subject, group);
            }
        }
    }

    (0..arena.containers.len())
        .filter(|&i| arena.containers[i].parent.is_none() && !removed.contains(&i))
        .filter(|&i| arena.containers[i].message.is_some() || !arena.containers[i].children.is_empty())
        .collect()
}

fn materialize(arena: &Arena, root: usize, messages: &[Message]) -> Thread {
    fn build(arena: &Arena, idx: usize, messages: &[Message]) -> ThreadNode {
        let mut children: Vec<ThreadNode> = arena.containers[idx]
            .children
            .iter()
            .map(|&c| build(arena, c, messages))
            .collect();
        children.sort_by(|a, b| child_key(a).cmp(&child_key(b)));
        ThreadNode {
            msg_id: arena.containers[idx].id.clone(),
            message: arena.containers[idx].message.map(|mi| messages[mi].clone()),
            children,
        }
    }

    fn child_key(n: &ThreadNode) -> (i64, bool, String) {
        match &n.message {
            Some(m) => (m.timestamp_utc, m.is_synthetic_id(), m.msg_id.clone()),
            None => (i64::MAX, true, n.msg_id.clone()),
        }
    }

    let root_node = build(arena, root, messages);
    let mut all = Vec::new();
    root_node.walk(&mut all);
    let real: Vec<&Message> = all.iter().filter_map(|n| n.message.as_ref()).collect();
    let size = real.len();
    let opening = real
        .iter()
        .min_by_key(|m| m.order_key())
        .map(|m| m.msg_id.clone())
        .unwrap_or_else(|| root_node.msg_id.clone());
    let subject = match &root_node.message {
        Some(m) => m.normalized_subject.clone(),
        None => real
            .first()
            .map(|m| m.normalized_subject.clone())
            .unwrap_or_default(),
    };
    Thread {
        root: root_node,
        size,
        subject,
        opening_msg_id: opening,
    }
}

// ---------------------------------------------------------------------------
// filter + summary
// ---------------------------------------------------------------------------

/// Keep threads with at least `min_size` real messages, preserving order.
pub fn filter_threads(threads: Vec<Thread>, min_size: usize) -> Result<Vec<Thread>> {
    if min_size == 0 {
        return Err(Error::Config(
            "min_size 0 would filter nothing; use 1 to keep singletons".into(),
        ));
    }
    Ok(threads.into_iter().filter(|t| t.size >= min_size).collect())
}

/// Headline counts over the retained threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub threads: usize,
    pub messages: usize,
    pub authors: usize,
}

/// Thread/message/author counts over filtered threads. Authors are distinct
/// resolved identities appearing as senders.
pub fn corpus_summary(threads: &[Thread], ids: &IdentityIndex) -> CorpusSummary {
    let mut messages = 0usize;
    let mut authors: std::collections::BTreeSet<String> = Default::default();
    for t in threads {
        for m in t.messages() {
            messages += 1;
            match ids.canonical_for_msg(&m.msg_id) {
                Some(c) => {
                    authors.insert(c.to_string());
                }
                None => {
                    // Identity resolution is a precondition; fall back to the
                    // raw address rather than undercounting.
                    authors.insert(m.sender_email.clone());
                }
            }
        }
    }
    CorpusSummary {
        threads: threads.len(),
        messages,
        authors: authors.len(),
    }
}

// ---------------------------------------------------------------------------
// Persistence records
// ---------------------------------------------------------------------------

/// Serializable mirror of a [`ThreadNode`]: messages are stored by id only.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ThreadNodeRecord {
    pub msg_id: String,
    pub dummy: bool,
    pub children: Vec<ThreadNodeRecord>,
}

/// Serializable mirror of a [`Thread`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ThreadRecord {
    pub subject: String,
    pub size: usize,
    pub opening_msg_id: String,
    pub root: ThreadNodeRecord,
}

impl Thread {
    pub fn to_record(&self) -> ThreadRecord {
        fn rec(n: &ThreadNode) -> ThreadNodeRecord {
            ThreadNodeRecord {
                msg_id: n.msg_id.clone(),
                dummy: n.is_dummy(),
                children: n.children.iter().map(rec).collect(),
            }
        }
        ThreadRecord {
            subject: self.subject.clone(),
            size: self.size,
            opening_msg_id: self.opening_msg_id.clone(),
            root: rec(&self.root),
        }
    }

    /// Rebuild a thread from its record, reattaching messages by id.
    pub fn from_record(record: &ThreadRecord, by_id: &HashMap<String, Message>) -> Result<Thread> {
        fn rec(n: &ThreadNodeRecord, by_id: &HashMap<String, Message>) -> Result<ThreadNode> {
            let message = if n.dummy {
                None
            } else {
                Some(by_id.get(&n.msg_id).cloned().ok_or_else(|| Error::Data(
                    format!("thread references msg_id '{}' missing from the message dataset", n.msg_id),
                ))?)
            };
            Ok(ThreadNode {
                msg_id: n.msg_id.clone(),
                message,
                children: n
                    .children
                    .iter()
                    .map(|c| rec(c, by_id))
                    .collect::<Result<Vec<_>>>()?,
            })
        }
        Ok(Thread {
            root: rec(&record.root, by_id)?,
            size: record.size,
            subject: record.subject.clone(),
            opening_msg_id: record.opening_msg_id.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::msg;

    fn sizes(forest: &ThreadForest) -> Vec<usize> {
        forest.threads.iter().map(|t| t.size).collect()
    }

    #[test]
    fn linear_chain_threads_to_depth_three() {
        let messages = vec![
            msg("a", "alice@x", 100, "topic", &[]),
            msg("b", "bob@x", 110, "Re: topic", &["a"]),
            msg("c", "carol@x", 120, "Re: topic", &["a", "b"]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(forest.threads.len(), 1);
        let t = &forest.threads[0];
        assert_eq!(t.size, 3);
        assert_eq!(t.root.msg_id, "a");
        assert_eq!(t.root.children[0].msg_id, "b");
        assert_eq!(t.root.children[0].children[0].msg_id, "c");
        assert_eq!(t.opening_msg_id, "a");
    }

    #[test]
    fn unlinked_different_subjects_stay_separate() {
        let messages = vec![
            msg("a", "alice@x", 100, "one", &[]),
            msg("b", "bob@x", 110, "two", &[]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(sizes(&forest), vec![1, 1]);
    }

    #[test]
    fn dangling_reference_dummy_is_pruned_and_child_promoted() {
        // B's chain is a -> missing -> b; the dummy for `missing` is spliced
        // out, so b hangs directly off a.
        let messages = vec![
            msg("a", "alice@x", 100, "topic", &[]),
            msg("b", "bob@x", 110, "Re: topic", &["a", "missing"]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(forest.threads.len(), 1);
        let t = &forest.threads[0];
        assert_eq!(t.size, 2);
        assert_eq!(t.root.msg_id, "a");
        assert_eq!(t.root.children.len(), 1);
        assert_eq!(t.root.children[0].msg_id, "b");
        assert!(t.root.children[0].children.is_empty());
    }

    #[test]
    fn in_reply_to_used_when_references_absent() {
        let mut b = msg("b", "bob@x", 110, "Re: topic", &[]);
        b.in_reply_to = Some("a".into());
        let messages = vec![msg("a", "alice@x", 100, "topic", &[]), b];
        let forest = build_threads(&messages);
        assert_eq!(forest.threads.len(), 1);
        assert_eq!(forest.threads[0].size, 2);
    }

    #[test]
    fn cycle_is_broken_with_warning() {
        let messages = vec![
            msg("z1", "a@x", 300, "gamma", &["z2"]),
            msg("z2", "b@x", 310, "Re: gamma", &["z1"]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(forest.threads.len(), 1);
        let t = &forest.threads[0];
        assert_eq!(t.size, 2);
        // z1 claimed z2 as parent first; z2's conflicting link is refused.
        assert_eq!(t.root.msg_id, "z2");
        assert_eq!(t.root.children[0].msg_id, "z1");
        assert!(forest.warnings.iter().any(|w| w.kind == "thread-cycle"));
        // The corrupt pair still orders by timestamp for the opening author.
        assert_eq!(t.opening_msg_id, "z1");
    }

    #[test]
    fn reply_root_groups_under_original_by_subject() {
        let messages = vec![
            msg("w1", "a@x", 400, "delta issue", &[]),
            msg("w2", "b@x", 410, "Re: delta issue", &[]),
            msg("w3", "c@x", 420, "Re: delta issue", &["w2"]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(forest.threads.len(), 1);
        let t = &forest.threads[0];
        assert_eq!(t.root.msg_id, "w1");
        assert_eq!(t.root.children[0].msg_id, "w2");
        assert_eq!(t.root.children[0].children[0].msg_id, "w3");
    }

    #[test]
    fn two_originals_with_same_subject_share_a_group_container() {
        let messages = vec![
            msg("v1", "a@x", 500, "epsilon news", &[]),
            msg("v2", "b@x", 510, "epsilon news", &[]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(forest.threads.len(), 1);
        let t = &forest.threads[0];
        assert!(t.root.is_dummy());
        assert_eq!(t.root.msg_id, "subject:epsilon news");
        assert_eq!(t.size, 2);
        assert_eq!(t.opening_msg_id, "v1");
        let kids: Vec<&str> = t.root.children.iter().map(|c| c.msg_id.as_str()).collect();
        assert_eq!(kids, vec!["v1", "v2"]);
    }

    #[test]
    fn filter_keeps_only_min_size_and_order() {
        let messages = vec![
            msg("a", "a@x", 1, "s1", &[]),
            msg("b1", "a@x", 2, "s2", &[]),
            msg("b2", "b@x", 3, "Re: s2", &["b1"]),
            msg("b3", "c@x", 4, "Re: s2", &["b1"]),
            msg("c1", "a@x", 5, "s3", &[]),
            msg("c2", "b@x", 6, "Re: s3", &["c1"]),
        ];
        let forest = build_threads(&messages);
        assert_eq!(sizes(&forest), vec![1, 3, 2]);
        let filtered = filter_threads(forest.threads, 2).unwrap();
        let sz: Vec<usize> = filtered.iter().map(|t| t.size).collect();
        assert_eq!(sz, vec![3, 2]);
    }

    #[test]
    fn filter_all_singletons_empty_and_min_zero_errors() {
        let messages = vec![msg("a", "a@x", 1, "s1", &[]), msg("b", "b@x", 2, "s2", &[])];
        let forest = build_threads(&messages);
        assert!(filter_threads(forest.threads.clone(), 2).unwrap().is_empty());
        assert!(matches!(
            filter_threads(forest.threads, 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn filter_fixture_sizes_1_2_5_26() {
        // Threads of sizes 1, 2, 5 and 26; min 2 keeps 3 threads, 33 messages.
        let mut messages = Vec::new();
        messages.push(msg("solo", "a@x", 1, "solo", &[]));
        for (label, n) in [("t2", 2usize), ("t5", 5), ("t26", 26)] {
            let root = format!("{label}-0");
            messages.push(msg(&root, "a@x", 10, label, &[]));
            for i in 1..n {
                let id = format!("{label}-{i}");
                messages.push(msg(&id, "b@x", 10 + i as i64, &format!("Re: {label}"), &[&root]));
            }
        }
        let forest = build_threads(&messages);
        let total: usize = sizes(&forest).iter().sum();
        assert_eq!(total, messages.len());
        let filtered = filter_threads(forest.threads, 2).unwrap();
        assert_eq!(filtered.len(), 3);
        assert_eq!(filtered.iter().map(|t| t.size).sum::<usize>(), 33);
    }

    #[test]
    fn children_sorted_by_timestamp_then_synthetic_then_id() {
        let messages = vec![
            msg("root", "a@x", 1, "s", &[]),
            msg("late", "b@x", 30, "Re: s", &["root"]),
            msg("synthetic:tie", "c@x", 20, "Re: s", &["root"]),
            msg("b-tie", "d@x", 20, "Re: s", &["root"]),
            msg("a-tie", "e@x", 20, "Re: s", &["root"]),
        ];
        let forest = build_threads(&messages);
        let kids: Vec<&str> = forest.threads[0]
            .root
            .children
            .iter()
            .map(|c| c.msg_id.as_str())
            .collect();
        assert_eq!(kids, vec!["a-tie", "b-tie", "synthetic:tie", "late"]);
    }

    #[test]
    fn build_is_order_independent() {
        let mut messages = vec![
            msg("a", "alice@x", 100, "topic", &[]),
            msg("b", "bob@x", 110, "Re: topic", &["a"]),
            msg("c", "carol@x", 120, "Re: topic", &["a", "b"]),
            msg("d", "dave@x", 130, "Re: topic", &["a"]),
            msg("e", "erin@x", 140, "other", &[]),
        ];
        let forward = build_threads(&messages);
        messages.reverse();
        let backward = build_threads(&messages);
        let fw: Vec<ThreadRecord> = forward.threads.iter().map(|t| t.to_record()).collect();
        let bw: Vec<ThreadRecord> = backward.threads.iter().map(|t| t.to_record()).collect();
        assert_eq!(fw, bw);
    }

    #[test]
    fn record_round_trip_reattaches_messages() {
        let messages = vec![
            msg("a", "alice@x", 100, "topic", &[]),
            msg("b", "bob@x", 110, "Re: topic", &["a"]),
        ];
        let forest = build_threads(&messages);
        let record = forest.threads[0].to_record();
        let by_id: HashMap<String, Message> =
            messages.iter().map(|m| (m.msg_id.clone(), m.clone())).collect();
        let rebuilt = Thread::from_record(&record, &by_id).unwrap();
        assert_eq!(rebuilt, forest.threads[0]);
    }
}
