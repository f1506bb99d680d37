//! Event vocabulary, pitch coordinates, and ingestion of raw match-event files.
//!
//! The wire format is line-delimited CSV, one event per line, columns
//! `match_id,player_id,team_id,minute,half,type,result,attribute,x,y`
//! (see `docs/formats.md`). Coordinates arrive attack-normalized: both teams
//! attack toward `x = 100` in both halves, `y = 0` is the right touchline
//! from the attacker's point of view.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A location on the normalized pitch, both axes in \[0, 100\].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchPoint {
    pub x: f64,
    pub y: f64,
}

impl PitchPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=100.0).contains(&x) || !(0.0..=100.0).contains(&y) {
            return Err(Error::Config(format!("pitch point ({x}, {y}) outside [0, 100]²")));
        }
        Ok(PitchPoint { x, y })
    }

    /// Reflection about the lateral midline `y = 50`.
    pub fn mirrored(&self) -> PitchPoint {
        PitchPoint {
            x: self.x,
            y: 100.0 - self.y,
        }
    }

    pub fn distance(&self, other: &PitchPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// The ten on-ball action categories that feed the style vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActionCategory {
    Shot,
    Cross,
    Dribble,
    Pass,
    LongPass,
    KeyPass,
    Interception,
    Clearance,
    Header,
    Recovery,
}

impl ActionCategory {
    pub const ALL: [ActionCategory; 10] = [
        ActionCategory::Shot,
        ActionCategory::Cross,
        ActionCategory::Dribble,
        ActionCategory::Pass,
        ActionCategory::LongPass,
        ActionCategory::KeyPass,
        ActionCategory::Interception,
        ActionCategory::Clearance,
        ActionCategory::Header,
        ActionCategory::Recovery,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ActionCategory::Shot => "Shot",
            ActionCategory::Cross => "Cross",
            ActionCategory::Dribble => "Dribble",
            ActionCategory::Pass => "Pass",
            ActionCategory::LongPass => "LongPass",
            ActionCategory::KeyPass => "KeyPass",
            ActionCategory::Interception => "Interception",
            ActionCategory::Clearance => "Clearance",
            ActionCategory::Header => "Header",
            ActionCategory::Recovery => "Recovery",
        }
    }

    /// Lowercase identifier used in file names and config keys.
    pub fn slug(&self) -> &'static str {
        match self {
            ActionCategory::Shot => "shot",
            ActionCategory::Cross => "cross",
            ActionCategory::Dribble => "dribble",
            ActionCategory::Pass => "pass",
            ActionCategory::LongPass => "long_pass",
            ActionCategory::KeyPass => "key_pass",
            ActionCategory::Interception => "interception",
            ActionCategory::Clearance => "clearance",
            ActionCategory::Header => "header",
            ActionCategory::Recovery => "recovery",
        }
    }

    pub fn from_slug(s: &str) -> Option<ActionCategory> {
        ActionCategory::ALL.iter().copied().find(|c| c.slug() == s)
    }
}

impl fmt::Display for ActionCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Closed vocabulary of the source event taxonomy.
pub mod vocabulary {
    /// The 44 raw event names of the source taxonomy.
    pub const EVENT_NAMES: [&str; 44] = [
        "Simple pass",
        "Long pass",
        "Throw in",
        "Goal kick",
        "Freekick pass",
        "Cross",
        "Freekick cross",
        "Corner cross",
        "Shot",
        "Freekick shot",
        "Penalty shot",
        "Corner shot",
        "Chance missed",
        "Offside",
        "Own goal",
        "Clearance",
        "Interception",
        "Tackle",
        "Defensive duel",
        "Blocked pass",
        "Blocked shot",
        "Defensive foul",
        "Offensive foul",
        "Red card",
        "Second yellow card",
        "Yellow card",
        "Aerial duel",
        "Shield ball out",
        "Ball recovery",
        "Offside provoked",
        "Foul conceded",
        "TakeOn",
        "Dribble",
        "Touch",
        "Dispossessed",
        "Error",
        "Keeper save",
        "Keeper pickup",
        "Penalty faced",
        "Keeper sweeper",
        "Keeper smother",
        "Keeper punch",
        "Keeper claim",
        "CrossNotClaimed",
    ];

    /// Result labels; the empty string means "no result recorded".
    pub const RESULTS: [&str; 14] = [
        "",
        "Goal",
        "On target",
        "Off target",
        "On post",
        "Blocked",
        "Assist",
        "Keypass",
        "Successful",
        "Unsuccessful",
        "Own goal",
        "Red card",
        "Second yellow card",
        "Yellow card",
    ];

    /// Attribute labels; the empty string means "no attribute recorded".
    pub const ATTRIBUTES: [&str; 5] = ["", "Simple", "Through", "Out box", "In box"];

    /// Events that carry pass results (Assist/Keypass/Successful/Unsuccessful).
    pub const PASS_FAMILY: [&str; 8] = [
        "Simple pass",
        "Long pass",
        "Throw in",
        "Goal kick",
        "Freekick pass",
        "Cross",
        "Freekick cross",
        "Corner cross",
    ];

    pub fn is_event_name(name: &str) -> bool {
        EVENT_NAMES.contains(&name)
    }

    pub fn is_result(result: &str) -> bool {
        RESULTS.contains(&result)
    }

    pub fn is_attribute(attribute: &str) -> bool {
        ATTRIBUTES.contains(&attribute)
    }
}

/// One raw event type as it appears on the wire: name plus outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEventType {
    pub name: String,
    pub result: String,
    pub attribute: String,
}

impl RawEventType {
    /// Validates all three labels against the closed vocabulary.
    pub fn new(name: &str, result: &str, attribute: &str) -> Result<Self> {
        if !vocabulary::is_event_name(name) {
            return Err(Error::UnknownEventType(name.to_string()));
        }
        if !vocabulary::is_result(result) {
            return Err(Error::UnknownEventResult(result.to_string()));
        }
        if !vocabulary::is_attribute(attribute) {
            return Err(Error::UnknownEventAttribute(attribute.to_string()));
        }
        Ok(RawEventType {
            name: name.to_string(),
            result: result.to_string(),
            attribute: attribute.to_string(),
        })
    }
}

/// Raw event name → category table, with the key-pass result rule.
///
/// The table is configuration: entries can be overridden (e.g. to count
/// throw-ins as passes). `keypass_double_count` controls whether an event
/// flagged as a key pass also stays in its base category.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryMapping {
    base: BTreeMap<String, ActionCategory>,
    keypass_sources: BTreeSet<String>,
    keypass_results: BTreeSet<String>,
    pub keypass_double_count: bool,
}

impl Default for CategoryMapping {
    fn default() -> Self {
        let mut base = BTreeMap::new();
        for name in ["Shot", "Freekick shot", "Penalty shot", "Corner shot"] {
            base.insert(name.to_string(), ActionCategory::Shot);
        }
        for name in ["Cross", "Freekick cross", "Corner cross"] {
            base.insert(name.to_string(), ActionCategory::Cross);
        }
        // Throw-ins and goal kicks are restarts from out of play; excluded by default.
        for name in ["Simple pass", "Freekick pass"] {
            base.insert(name.to_string(), ActionCategory::Pass);
        }
        base.insert("Long pass".to_string(), ActionCategory::LongPass);
        for name in ["Dribble", "TakeOn"] {
            base.insert(name.to_string(), ActionCategory::Dribble);
        }
        for name in ["Interception", "Blocked pass"] {
            base.insert(name.to_string(), ActionCategory::Interception);
        }
        base.insert("Clearance".to_string(), ActionCategory::Clearance);
        base.insert("Aerial duel".to_string(), ActionCategory::Header);
        // Keeper pickups are a goalkeeper action, not a field recovery.
        base.insert("Ball recovery".to_string(), ActionCategory::Recovery);

        CategoryMapping {
            base,
            keypass_sources: vocabulary::PASS_FAMILY
                .iter()
                .map(|s| s.to_string())
                .collect(),
            keypass_results: ["Keypass", "Assist"].iter().map(|s| s.to_string()).collect(),
            keypass_double_count: true,
        }
    }
}

impl CategoryMapping {
    /// Overrides the base category of one raw event name. `None` excludes it.
    pub fn set_base(&mut self, name: &str, category: Option<ActionCategory>) -> Result<()> {
        if !vocabulary::is_event_name(name) {
            return Err(Error::UnknownEventType(name.to_string()));
        }
        match category {
            Some(c) => {
                self.base.insert(name.to_string(), c);
            }
            None => {
                self.base.remove(name);
            }
        }
        Ok(())
    }

    /// The base category of a raw type, ignoring the key-pass rule.
    pub fn base_category(&self, raw: &RawEventType) -> Result<Option<ActionCategory>> {
        if !vocabulary::is_event_name(&raw.name) {
            return Err(Error::UnknownEventType(raw.name.clone()));
        }
        Ok(self.base.get(&raw.name).copied())
    }

    fn is_keypass(&self, raw: &RawEventType) -> bool {
        self.keypass_sources.contains(&raw.name) && self.keypass_results.contains(&raw.result)
    }

    /// Every category the event contributes to: the base category plus
    /// `KeyPass` when the key-pass rule fires. With double counting off, a
    /// key pass leaves its base category.
    pub fn categories(&self, raw: &RawEventType) -> Result<Vec<ActionCategory>> {
        let base = self.base_category(raw)?;
        let mut out = Vec::with_capacity(2);
        if self.is_keypass(raw) {
            if self.keypass_double_count {
                if let Some(c) = base {
                    out.push(c);
                }
            }
            out.push(ActionCategory::KeyPass);
        } else if let Some(c) = base {
            out.push(c);
        }
        Ok(out)
    }
}

/// Category of a raw type under the default mapping table.
pub fn map_raw_to_category(raw: &RawEventType) -> Result<Option<ActionCategory>> {
    CategoryMapping::default().base_category(raw)
}

/// One on-ball action after ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvent {
    pub match_id: String,
    pub player_id: String,
    pub team_id: String,
    pub minute: u32,
    pub half: u8,
    pub raw_type: RawEventType,
    pub category: Option<ActionCategory>,
    pub location: PitchPoint,
}

/// Identifies one player's appearance in one match. Orders by
/// `(match_id, player_id)`, the canonical column order of heatmap matrices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlayerMatchKey {
    pub match_id: String,
    pub player_id: String,
}

impl PlayerMatchKey {
    pub fn new(match_id: &str, player_id: &str) -> Self {
        PlayerMatchKey {
            match_id: match_id.to_string(),
            player_id: player_id.to_string(),
        }
    }
}

impl fmt::Display for PlayerMatchKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.match_id, self.player_id)
    }
}

/// Official lineup position labels of the source data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StartPosition {
    #[serde(rename = "FW")]
    Forward,
    #[serde(rename = "MF")]
    Midfielder,
    #[serde(rename = "CD")]
    CenterDefender,
    #[serde(rename = "L/RM")]
    SideMidfielder,
    #[serde(rename = "L/RD")]
    SideDefender,
    #[serde(rename = "GK")]
    Goalkeeper,
}

impl StartPosition {
    pub fn as_str(&self) -> &'static str {
        match self {
            StartPosition::Forward => "FW",
            StartPosition::Midfielder => "MF",
            StartPosition::CenterDefender => "CD",
            StartPosition::SideMidfielder => "L/RM",
            StartPosition::SideDefender => "L/RD",
            StartPosition::Goalkeeper => "GK",
        }
    }

    pub fn parse(s: &str) -> Option<StartPosition> {
        match s {
            "FW" => Some(StartPosition::Forward),
            "MF" => Some(StartPosition::Midfielder),
            "CD" => Some(StartPosition::CenterDefender),
            "L/RM" => Some(StartPosition::SideMidfielder),
            "L/RD" => Some(StartPosition::SideDefender),
            "GK" => Some(StartPosition::Goalkeeper),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nationality {
    Domestic,
    Foreign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchOutcome {
    Win,
    Draw,
    Loss,
}

/// One starting-lineup appearance with its performance indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerMatchRecord {
    pub match_id: String,
    pub player_id: String,
    pub minutes_played: f64,
    pub start_position: StartPosition,
    pub rating: f64,
    pub goals: u32,
    pub shots: u32,
    pub assists: u32,
    pub nationality: Nationality,
    pub outcome: MatchOutcome,
}

impl PlayerMatchRecord {
    pub fn key(&self) -> PlayerMatchKey {
        PlayerMatchKey::new(&self.match_id, &self.player_id)
    }
}

/// Ingestion knobs. `clamp_slack` is how far past \[0, 100\] a coordinate may
/// stray and still be clamped; anything further is rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestConfig {
    pub clamp_slack: f64,
    pub mapping: CategoryMapping,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            clamp_slack: 0.5,
            mapping: CategoryMapping::default(),
        }
    }
}

/// Ingestion output: validated events plus warning counters.
#[derive(Debug, Clone)]
pub struct Ingest {
    pub events: Vec<MatchEvent>,
    /// Records dropped because x or y was missing.
    pub dropped_missing_location: u64,
}

pub const EVENTS_HEADER: [&str; 10] = [
    "match_id", "player_id", "team_id", "minute", "half", "type", "result", "attribute", "x", "y",
];

pub const RECORDS_HEADER: [&str; 10] = [
    "match_id",
    "player_id",
    "minutes_played",
    "start_position_label",
    "rating",
    "goals",
    "shots",
    "assists",
    "nationality_class",
    "match_outcome",
];

fn malformed(path: &Path, line: u64, reason: impl Into<String>) -> Error {
    Error::MalformedRecord {
        path: path.to_path_buf(),
        line,
        reason: reason.into(),
    }
}

fn check_header(path: &Path, got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    let got_cols: Vec<&str> = got.iter().collect();
    if got_cols != want {
        return Err(malformed(
            path,
            1,
            format!("header must be `{}`, got `{}`", want.join(","), got_cols.join(",")),
        ));
    }
    Ok(())
}

/// Parses and validates a raw event file.
///
/// Coordinates within `clamp_slack` of the \[0, 100\] range are clamped;
/// farther ones are an error. Rows with empty coordinates are dropped and
/// counted. Categories are assigned from the mapping table.
pub fn ingest_events(path: &Path, config: &IngestConfig) -> Result<Ingest> {
    let file = std::fs::File::open(path)?;
    ingest_events_from(file, path, config)
}

fn ingest_events_from<R: Read>(reader: R, path: &Path, config: &IngestConfig) -> Result<Ingest> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(path, rdr.headers()?, &EVENTS_HEADER)?;

    let clamp = |v: f64| v.clamp(0.0, 100.0);
    let mut events = Vec::new();
    let mut dropped = 0u64;

    for (idx, row) in rdr.records().enumerate() {
        let line = idx as u64 + 2; // header is line 1
        let row = row?;
        if row.len() != EVENTS_HEADER.len() {
            return Err(malformed(path, line, format!("expected 10 fields, got {}", row.len())));
        }
        let field = |i: usize| row.get(i).unwrap_or("");

        let minute: u32 = field(3)
            .parse()
            .map_err(|_| malformed(path, line, format!("bad minute `{}`", field(3))))?;
        let half: u8 = field(4)
            .parse()
            .map_err(|_| malformed(path, line, format!("bad half `{}`", field(4))))?;
        if half != 1 && half != 2 {
            return Err(malformed(path, line, format!("half must be 1 or 2, got {half}")));
        }

        let raw_type = RawEventType::new(field(5), field(6), field(7))?;

        if field(8).is_empty() || field(9).is_empty() {
            dropped += 1;
            continue;
        }
        let x: f64 = field(8)
            .parse()
            .map_err(|_| malformed(path, line, format!("bad x `{}`", field(8))))?;
        let y: f64 = field(9)
            .parse()
            .map_err(|_| malformed(path, line, format!("bad y `{}`", field(9))))?;
        let slack = config.clamp_slack;
        if !x.is_finite()
            || !y.is_finite()
            || x < -slack
            || x > 100.0 + slack
            || y < -slack
            || y > 100.0 + slack
        {
            return Err(Error::CoordinateOutOfRange {
                path: path.to_path_buf(),
                line,
                x,
                y,
            });
        }

        let category = config.mapping.base_category(&raw_type)?;
        events.push(MatchEvent {
            match_id: field(0).to_string(),
            player_id: field(1).to_string(),
            team_id: field(2).to_string(),
            minute,
            half,
            raw_type,
            category,
            location: PitchPoint {
                x: clamp(x),
                y: clamp(y),
            },
        });
    }

    Ok(Ingest {
        events,
        dropped_missing_location: dropped,
    })
}

/// Writes events back out in the wire format (the canonical artifact after
/// ingestion). Output is byte-deterministic for a given event list.
pub fn write_events_csv(path: &Path, events: &[MatchEvent]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(EVENTS_HEADER)?;
    for e in events {
        w.write_record([
            e.match_id.as_str(),
            e.player_id.as_str(),
            e.team_id.as_str(),
            &e.minute.to_string(),
            &e.half.to_string(),
            &e.raw_type.name,
            &e.raw_type.result,
            &e.raw_type.attribute,
            &format_coord(e.location.x),
            &format_coord(e.location.y),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn format_coord(v: f64) -> String {
    let mut s = ryu_like(v);
    if s.ends_with(".0") {
        s.truncate(s.len() - 2);
    }
    s
}

fn ryu_like(v: f64) -> String {
    // Shortest representation that round-trips; `{}` on f64 guarantees this.
    format!("{v}")
}

/// Reads the player-match record file.
pub fn read_player_records(path: &Path) -> Result<Vec<PlayerMatchRecord>> {
    let file = std::fs::File::open(path)?;
    read_player_records_from(file, path)
}

fn read_player_records_from<R: Read>(reader: R, path: &Path) -> Result<Vec<PlayerMatchRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    check_header(path, rdr.headers()?, &RECORDS_HEADER)?;

    let mut records = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let line = idx as u64 + 2;
        let row = row?;
        if row.len() != RECORDS_HEADER.len() {
            return Err(malformed(path, line, format!("expected 10 fields, got {}", row.len())));
        }
        let field = |i: usize| row.get(i).unwrap_or("");
        let parse_f64 = |i: usize, what: &str| -> Result<f64> {
            field(i)
                .parse()
                .map_err(|_| malformed(path, line, format!("bad {what} `{}`", field(i))))
        };
        let parse_u32 = |i: usize, what: &str| -> Result<u32> {
            field(i)
                .parse()
                .map_err(|_| malformed(path, line, format!("bad {what} `{}`", field(i))))
        };

        let minutes = parse_f64(2, "minutes_played")?;
        if !(minutes >= 0.0) {
            return Err(malformed(path, line, format!("negative minutes_played {minutes}")));
        }
        let start_position = StartPosition::parse(field(3))
            .ok_or_else(|| malformed(path, line, format!("bad start_position_label `{}`", field(3))))?;
        let nationality = match field(8) {
            "domestic" => Nationality::Domestic,
            "foreign" => Nationality::Foreign,
            other => return Err(malformed(path, line, format!("bad nationality_class `{other}`"))),
        };
        let outcome = match field(9) {
            "win" => MatchOutcome::Win,
            "draw" => MatchOutcome::Draw,
            "loss" => MatchOutcome::Loss,
            other => return Err(malformed(path, line, format!("bad match_outcome `{other}`"))),
        };

        records.push(PlayerMatchRecord {
            match_id: field(0).to_string(),
            player_id: field(1).to_string(),
            minutes_played: minutes,
            start_position,
            rating: parse_f64(4, "rating")?,
            goals: parse_u32(5, "goals")?,
            shots: parse_u32(6, "shots")?,
            assists: parse_u32(7, "assists")?,
            nationality,
            outcome,
        });
    }
    Ok(records)
}

/// Writes the player-match record file.
pub fn write_player_records(path: &Path, records: &[PlayerMatchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RECORDS_HEADER)?;
    for r in records {
        w.write_record([
            r.match_id.as_str(),
            r.player_id.as_str(),
            &format_coord(r.minutes_played),
            r.start_position.as_str(),
            &format_coord(r.rating),
            &r.goals.to_string(),
            &r.shots.to_string(),
            &r.assists.to_string(),
            match r.nationality {
                Nationality::Domestic => "domestic",
                Nationality::Foreign => "foreign",
            },
            match r.outcome {
                MatchOutcome::Win => "win",
                MatchOutcome::Draw => "draw",
                MatchOutcome::Loss => "loss",
            },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Keeps starters who played more than 45 minutes, goalkeepers excluded.
pub fn filter_eligible(records: &[PlayerMatchRecord]) -> Vec<PlayerMatchRecord> {
    records
        .iter()
        .filter(|r| r.minutes_played > 45.0 && r.start_position != StartPosition::Goalkeeper)
        .cloned()
        .collect()
}

#[allow(dead_code)]
fn _ingest_is_send_sync() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<IngestConfig>();
    assert_send_sync::<MatchEvent>();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(name: &str) -> RawEventType {
        RawEventType::new(name, "", "").unwrap()
    }

    #[test]
    fn vocabulary_has_44_names() {
        assert_eq!(vocabulary::EVENT_NAMES.len(), 44);
        let dedup: BTreeSet<_> = vocabulary::EVENT_NAMES.iter().collect();
        assert_eq!(dedup.len(), 44);
    }

    #[test]
    fn mapping_is_total_over_vocabulary() {
        let mapping = CategoryMapping::default();
        for name in vocabulary::EVENT_NAMES {
            let cat = mapping.base_category(&raw(name)).unwrap();
            if let Some(c) = cat {
                assert!(ActionCategory::ALL.contains(&c));
            }
        }
    }

    #[test]
    fn mapping_examples() {
        assert_eq!(map_raw_to_category(&raw("Simple pass")).unwrap(), Some(ActionCategory::Pass));
        assert_eq!(map_raw_to_category(&raw("Corner cross")).unwrap(), Some(ActionCategory::Cross));
        assert_eq!(map_raw_to_category(&raw("Penalty shot")).unwrap(), Some(ActionCategory::Shot));
        assert_eq!(map_raw_to_category(&raw("Keeper save")).unwrap(), None);
        assert_eq!(map_raw_to_category(&raw("Yellow card")).unwrap(), None);
        assert_eq!(map_raw_to_category(&raw("Keeper pickup")).unwrap(), None);
        assert_eq!(map_raw_to_category(&raw("Throw in")).unwrap(), None);
        assert_eq!(map_raw_to_category(&raw("Aerial duel")).unwrap(), Some(ActionCategory::Header));
    }

    #[test]
    fn unknown_event_name_is_an_error() {
        let e = RawEventType::new("Rabona", "", "").unwrap_err();
        assert!(matches!(e, Error::UnknownEventType(name) if name == "Rabona"));
    }

    #[test]
    fn keypass_rule_counts_both_by_default() {
        let mapping = CategoryMapping::default();
        let kp = RawEventType::new("Simple pass", "Keypass", "").unwrap();
        assert_eq!(
            mapping.categories(&kp).unwrap(),
            vec![ActionCategory::Pass, ActionCategory::KeyPass]
        );
        let assist = RawEventType::new("Cross", "Assist", "Through").unwrap();
        assert_eq!(
            mapping.categories(&assist).unwrap(),
            vec![ActionCategory::Cross, ActionCategory::KeyPass]
        );
        // Excluded base category, key-pass result: key pass only.
        let throw = RawEventType::new("Throw in", "Keypass", "").unwrap();
        assert_eq!(mapping.categories(&throw).unwrap(), vec![ActionCategory::KeyPass]);
    }

    #[test]
    fn keypass_double_count_can_be_disabled() {
        let mut mapping = CategoryMapping::default();
        mapping.keypass_double_count = false;
        let kp = RawEventType::new("Simple pass", "Keypass", "").unwrap();
        assert_eq!(mapping.categories(&kp).unwrap(), vec![ActionCategory::KeyPass]);
    }

    const HEADER: &str = "match_id,player_id,team_id,minute,half,type,result,attribute,x,y\n";

    fn ingest_str(body: &str, config: &IngestConfig) -> Result<Ingest> {
        let data = format!("{HEADER}{body}");
        ingest_events_from(data.as_bytes(), Path::new("test.csv"), config)
    }

    #[test]
    fn ingest_assigns_categories() {
        let out = ingest_str(
            "m1,p1,t1,12,1,Penalty shot,Goal,In box,94.2,48.0\n\
             m1,p1,t1,55,2,Yellow card,,,50,50\n",
            &IngestConfig::default(),
        )
        .unwrap();
        assert_eq!(out.events.len(), 2);
        assert_eq!(out.events[0].category, Some(ActionCategory::Shot));
        assert_eq!(out.events[1].category, None);
    }

    #[test]
    fn ingest_accepts_boundary_points() {
        let out = ingest_str("m1,p1,t1,0,1,Shot,On target,,100,0\n", &IngestConfig::default()).unwrap();
        assert_eq!(out.events[0].location.x, 100.0);
        assert_eq!(out.events[0].location.y, 0.0);
    }

    #[test]
    fn ingest_clamps_within_slack_and_rejects_beyond() {
        let cfg = IngestConfig::default();
        let out = ingest_str("m1,p1,t1,3,1,Shot,Blocked,,100.4,-0.3\n", &cfg).unwrap();
        assert_eq!(out.events[0].location.x, 100.0);
        assert_eq!(out.events[0].location.y, 0.0);

        let err = ingest_str("m1,p1,t1,3,1,Shot,Blocked,,101.0,50\n", &cfg).unwrap_err();
        assert!(matches!(err, Error::CoordinateOutOfRange { line: 2, .. }));

        let strict = IngestConfig {
            clamp_slack: 0.0,
            ..IngestConfig::default()
        };
        let err = ingest_str("m1,p1,t1,3,1,Shot,Blocked,,100.4,50\n", &strict).unwrap_err();
        assert!(matches!(err, Error::CoordinateOutOfRange { .. }));
    }

    #[test]
    fn ingest_drops_missing_coordinates_with_counter() {
        let out = ingest_str(
            "m1,p1,t1,3,1,Shot,Blocked,,,\n\
             m1,p1,t1,4,1,Shot,Goal,,90,44\n",
            &IngestConfig::default(),
        )
        .unwrap();
        assert_eq!(out.events.len(), 1);
        assert_eq!(out.dropped_missing_location, 1);
    }

    #[test]
    fn ingest_reports_line_numbers() {
        let err = ingest_str(
            "m1,p1,t1,3,1,Shot,Blocked,,90,40\n\
             m1,p1,t1,notanumber,1,Shot,Blocked,,90,40\n",
            &IngestConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::MalformedRecord { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn ingest_rejects_unknown_type_by_name() {
        let err = ingest_str("m1,p1,t1,3,1,Backheel,,,50,50\n", &IngestConfig::default()).unwrap_err();
        assert!(matches!(err, Error::UnknownEventType(name) if name == "Backheel"));
    }

    #[test]
    fn events_round_trip_is_byte_identical() {
        let cfg = IngestConfig::default();
        let body = "m1,p1,t1,12,1,Simple pass,Keypass,Through,33.25,61.5\n\
                    m2,p2,t2,88,2,Aerial duel,Successful,Simple,50,50\n";
        let out = ingest_str(body, &cfg).unwrap();

        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_events_csv(&p1, &out.events).unwrap();
        let again = ingest_events(&p1, &cfg).unwrap();
        assert_eq!(again.events, out.events);
        write_events_csv(&p2, &again.events).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    fn record(minutes: f64, pos: StartPosition) -> PlayerMatchRecord {
        PlayerMatchRecord {
            match_id: "m1".into(),
            player_id: "p1".into(),
            minutes_played: minutes,
            start_position: pos,
            rating: 7.0,
            goals: 0,
            shots: 1,
            assists: 0,
            nationality: Nationality::Domestic,
            outcome: MatchOutcome::Draw,
        }
    }

    #[test]
    fn eligibility_is_strict_and_excludes_goalkeepers() {
        let records = vec![
            record(45.0, StartPosition::Forward),
            record(90.0, StartPosition::Goalkeeper),
            record(46.0, StartPosition::Forward),
        ];
        let kept = filter_eligible(&records);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].minutes_played, 46.0);
    }

    #[test]
    fn records_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.csv");
        let records = vec![
            record(90.0, StartPosition::Forward),
            record(67.5, StartPosition::SideDefender),
        ];
        write_player_records(&path, &records).unwrap();
        let back = read_player_records(&path).unwrap();
        assert_eq!(back, records);
    }
}
