//! Deterministic synthetic-season generator with planted positions and
//! styles; the ground truth for end-to-end tests.
//!
//! Each archetype anchors one position blob: its pass blob is solved so the
//! rate-weighted mean of all its action locations lands exactly on the
//! anchor, which keeps per-match average positions tightly clustered per
//! position regardless of the style-specific action geometry.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artifacts::derive_seed;
use crate::error::{Error, Result};
use crate::events::{
    write_events_csv, write_player_records, ActionCategory, CategoryMapping, MatchEvent,
    MatchOutcome, Nationality, PitchPoint, PlayerMatchKey, PlayerMatchRecord, RawEventType,
    StartPosition,
};
use crate::positions::PositionLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBlob {
    pub weight: f64,
    pub mean: [f64; 2],
    pub std: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryProfile {
    /// Expected events per 90 minutes.
    pub rate: f64,
    pub blobs: Vec<GaussianBlob>,
}

impl CategoryProfile {
    fn mean(&self) -> [f64; 2] {
        let total: f64 = self.blobs.iter().map(|b| b.weight).sum();
        let mut mean = [0.0; 2];
        for b in &self.blobs {
            mean[0] += b.weight * b.mean[0];
            mean[1] += b.weight * b.mean[1];
        }
        [mean[0] / total, mean[1] / total]
    }
}

/// One planted player archetype: a position, a style, spatial action
/// profiles, and the distributions behind its match records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub position: PositionLabel,
    pub style: String,
    pub start_position: StartPosition,
    pub profiles: BTreeMap<ActionCategory, CategoryProfile>,
    pub rating_mean: f64,
    pub rating_sd: f64,
    pub goals_rate: f64,
    pub shots_rate: f64,
    pub assists_rate: f64,
    /// Probability a player of this archetype is domestic.
    pub domestic_share: f64,
    pub win_p: f64,
    pub draw_p: f64,
}

impl ArchetypeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.profiles.is_empty() {
            return Err(Error::InvalidArchetype(format!("{}: no action profiles", self.style)));
        }
        for (category, profile) in &self.profiles {
            if profile.rate < 0.0 {
                return Err(Error::InvalidArchetype(format!(
                    "{}: negative {category} rate",
                    self.style
                )));
            }
            if profile.blobs.is_empty() {
                return Err(Error::InvalidArchetype(format!(
                    "{}: {category} profile has no blobs",
                    self.style
                )));
            }
            for b in &profile.blobs {
                if b.weight <= 0.0 {
                    return Err(Error::InvalidArchetype(format!(
                        "{}: non-positive blob weight",
                        self.style
                    )));
                }
                if !(0.0..=100.0).contains(&b.mean[0]) || !(0.0..=100.0).contains(&b.mean[1]) {
                    return Err(Error::InvalidArchetype(format!(
                        "{}: blob mean {:?} outside the pitch",
                        self.style, b.mean
                    )));
                }
            }
        }
        if !(0.0..=1.0).contains(&self.domestic_share)
            || self.win_p < 0.0
            || self.draw_p < 0.0
            || self.win_p + self.draw_p > 1.0
        {
            return Err(Error::InvalidArchetype(format!("{}: bad shares", self.style)));
        }
        Ok(())
    }
}

/// Whole-season generation parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeagueSpec {
    pub archetypes: Vec<ArchetypeSpec>,
    pub players_per_archetype: usize,
    pub matchdays: usize,
    pub teams: usize,
    pub seed: u64,
}

impl LeagueSpec {
    pub fn validate(&self) -> Result<()> {
        if self.archetypes.is_empty() {
            return Err(Error::InvalidArchetype("no archetypes".into()));
        }
        if self.players_per_archetype == 0 || self.matchdays == 0 || self.teams == 0 {
            return Err(Error::InvalidArchetype(
                "players_per_archetype, matchdays and teams must be ≥ 1".into(),
            ));
        }
        for a in &self.archetypes {
            a.validate()?;
        }
        Ok(())
    }
}

impl Default for LeagueSpec {
    fn default() -> Self {
        LeagueSpec {
            archetypes: default_archetypes(),
            players_per_archetype: 6,
            matchdays: 32,
            teams: 8,
            seed: 42,
        }
    }
}

struct ArchetypeBuilder {
    position: PositionLabel,
    style: &'static str,
    start_position: StartPosition,
    anchor: [f64; 2],
    profiles: BTreeMap<ActionCategory, CategoryProfile>,
    pass_rate: f64,
    stats: (f64, f64, f64, f64, f64, f64, f64, f64),
}

impl ArchetypeBuilder {
    fn new(
        position: PositionLabel,
        style: &'static str,
        start_position: StartPosition,
        anchor: [f64; 2],
        pass_rate: f64,
    ) -> Self {
        ArchetypeBuilder {
            position,
            style,
            start_position,
            anchor,
            profiles: BTreeMap::new(),
            pass_rate,
            stats: (6.8, 0.7, 0.1, 1.0, 0.1, 0.7, 0.34, 0.30),
        }
    }

    fn profile(mut self, category: ActionCategory, rate: f64, blobs: &[(f64, [f64; 2], [f64; 2])]) -> Self {
        self.profiles.insert(
            category,
            CategoryProfile {
                rate,
                blobs: blobs
                    .iter()
                    .map(|&(weight, mean, std)| GaussianBlob { weight, mean, std })
                    .collect(),
            },
        );
        self
    }

    fn stats(
        mut self,
        rating: (f64, f64),
        goals: f64,
        shots: f64,
        assists: f64,
        domestic: f64,
        win_p: f64,
        draw_p: f64,
    ) -> Self {
        self.stats = (rating.0, rating.1, goals, shots, assists, domestic, win_p, draw_p);
        self
    }

    /// Solves the pass blob so the archetype's rate-weighted action mean
    /// equals the anchor, then finishes the spec.
    fn build(mut self) -> ArchetypeSpec {
        let mut rate_sum = self.pass_rate;
        let mut weighted = [0.0f64; 2];
        for profile in self.profiles.values() {
            let mean = profile.mean();
            rate_sum += profile.rate;
            weighted[0] += profile.rate * mean[0];
            weighted[1] += profile.rate * mean[1];
        }
        let pass_mean = [
            ((self.anchor[0] * rate_sum - weighted[0]) / self.pass_rate).clamp(5.0, 95.0),
            ((self.anchor[1] * rate_sum - weighted[1]) / self.pass_rate).clamp(5.0, 95.0),
        ];
        self.profiles.insert(
            ActionCategory::Pass,
            CategoryProfile {
                rate: self.pass_rate,
                blobs: vec![GaussianBlob {
                    weight: 1.0,
                    mean: pass_mean,
                    std: [8.0, 9.0],
                }],
            },
        );
        let (rating_mean, rating_sd, goals_rate, shots_rate, assists_rate, domestic_share, win_p, draw_p) =
            self.stats;
        ArchetypeSpec {
            position: self.position,
            style: self.style.to_string(),
            start_position: self.start_position,
            profiles: self.profiles,
            rating_mean,
            rating_sd,
            goals_rate,
            shots_rate,
            assists_rate,
            domestic_share,
            win_p,
            draw_p,
        }
    }
}

/// Mirrors a blob list about the lateral midline.
fn mirror_blobs(blobs: &[(f64, [f64; 2], [f64; 2])]) -> Vec<(f64, [f64; 2], [f64; 2])> {
    blobs
        .iter()
        .map(|&(w, [x, y], std)| (w, [x, 100.0 - y], std))
        .collect()
}

/// The shipped archetype library: 18 styles over 5 positions (the Inside
/// Forward comes in mirrored left and right variants sharing one style
/// name, so 19 specs). Anchors form a nine-blob position geometry: ST,
/// both wings, attacking CM, both defensive-mid shades, both full-back
/// flanks, CB.
pub fn default_archetypes() -> Vec<ArchetypeSpec> {
    use ActionCategory::*;
    use PositionLabel::*;
    let mut out = Vec::new();

    // Strikers, anchor (80, 50).
    out.push(
        ArchetypeBuilder::new(Striker, "Poacher", StartPosition::Forward, [80.0, 50.0], 22.0)
            .profile(Shot, 4.2, &[(1.0, [92.0, 50.0], [4.0, 7.0])])
            .profile(Header, 2.6, &[(1.0, [88.0, 50.0], [5.0, 8.0])])
            .profile(Dribble, 1.0, &[(1.0, [72.0, 50.0], [6.0, 8.0])])
            .profile(KeyPass, 0.3, &[(1.0, [82.0, 50.0], [6.0, 10.0])])
            .stats((7.38, 1.01), 0.65, 4.23, 0.12, 0.25, 0.36, 0.30)
            .build(),
    );
    out.push(
        ArchetypeBuilder::new(Striker, "Second Striker", StartPosition::Midfielder, [80.0, 50.0], 26.0)
            .profile(Shot, 2.9, &[(1.0, [74.0, 50.0], [5.0, 9.0])])
            .profile(Dribble, 3.0, &[(1.0, [62.0, 50.0], [6.0, 8.0])])
            .profile(
                KeyPass,
                1.2,
                &[(0.5, [75.0, 58.0], [6.0, 8.0]), (0.5, [75.0, 42.0], [6.0, 8.0])],
            )
            .profile(Header, 0.4, &[(1.0, [75.0, 50.0], [5.0, 8.0])])
            .stats((7.22, 0.95), 0.36, 2.86, 0.21, 0.24, 0.35, 0.30)
            .build(),
    );
    out.push(
        ArchetypeBuilder::new(Striker, "Mobile Striker", StartPosition::Forward, [80.0, 50.0], 24.0)
            .profile(
                Shot,
                2.2,
                &[(0.5, [85.0, 63.0], [5.0, 6.0]), (0.5, [85.0, 37.0], [5.0, 6.0])],
            )
            .profile(
                Cross,
                1.6,
                &[
                    (0.25, [88.0, 85.0], [4.0, 5.0]),
                    (0.25, [88.0, 15.0], [4.0, 5.0]),
                    (0.25, [72.0, 83.0], [5.0, 6.0]),
                    (0.25, [72.0, 17.0], [5.0, 6.0]),
                ],
            )
            .profile(
                Dribble,
                2.6,
                &[(0.5, [65.0, 80.0], [6.0, 7.0]), (0.5, [65.0, 20.0], [6.0, 7.0])],
            )
            .profile(Header, 0.4, &[(1.0, [80.0, 50.0], [5.0, 8.0])])
            .profile(
                KeyPass,
                0.6,
                &[(0.5, [78.0, 65.0], [6.0, 8.0]), (0.5, [78.0, 35.0], [6.0, 8.0])],
            )
            .stats((7.07, 0.88), 0.33, 2.22, 0.15, 0.38, 0.37, 0.30)
            .build(),
    );
    out.push(
        ArchetypeBuilder::new(Striker, "Target Man", StartPosition::Forward, [80.0, 50.0], 20.0)
            .profile(Header, 4.2, &[(1.0, [75.0, 50.0], [5.0, 8.0])])
            .profile(Shot, 2.2, &[(1.0, [88.0, 50.0], [4.0, 7.0])])
            .profile(Dribble, 0.5, &[(1.0, [70.0, 50.0], [6.0, 8.0])])
            .profile(KeyPass, 0.3, &[(1.0, [78.0, 50.0], [6.0, 10.0])])
            .stats((7.07, 0.82), 0.34, 2.23, 0.10, 0.22, 0.33, 0.30)
            .build(),
    );

    // Central midfielders: playmaker and wide midfielder share the
    // attacking-mid anchor, the defensive mids sit deeper on each shade.
    out.push(
        ArchetypeBuilder::new(CentralMidfielder, "Playmaker", StartPosition::Midfielder, [55.0, 50.0], 30.0)
            .profile(Dribble, 2.6, &[(1.0, [62.0, 50.0], [6.0, 8.0])])
            .profile(LongPass, 3.2, &[(1.0, [52.0, 50.0], [7.0, 10.0])])
            .profile(
                KeyPass,
                1.0,
                &[(0.5, [72.0, 58.0], [6.0, 8.0]), (0.5, [72.0, 42.0], [6.0, 8.0])],
            )
            .profile(
                Recovery,
                0.8,
                &[(0.5, [38.0, 56.0], [6.0, 7.0]), (0.5, [38.0, 44.0], [6.0, 7.0])],
            )
            .profile(Header, 0.3, &[(1.0, [55.0, 50.0], [5.0, 8.0])])
            .stats((6.83, 0.69), 0.09, 1.14, 0.08, 0.69, 0.32, 0.295)
            .build(),
    );
    let dm = |side: &'static str, anchor_y: f64, yy: fn(f64) -> f64| {
        let style: &'static str = if side == "L" {
            "L Defensive Midfielder"
        } else {
            "R Defensive Midfielder"
        };
        ArchetypeBuilder::new(CentralMidfielder, style, StartPosition::Midfielder, [45.0, anchor_y], 26.0)
            .profile(ActionCategory::Dribble, 1.4, &[(1.0, [38.0, yy(60.0)], [6.0, 7.0])])
            .profile(ActionCategory::LongPass, 1.6, &[(1.0, [32.0, yy(60.0)], [7.0, 8.0])])
            .profile(ActionCategory::Recovery, 3.6, &[(1.0, [33.0, yy(62.0)], [7.0, 8.0])])
            .profile(ActionCategory::Interception, 1.5, &[(1.0, [31.0, yy(63.0)], [6.0, 7.0])])
            .profile(ActionCategory::Header, 0.9, &[(1.0, [26.0, yy(58.0)], [5.0, 7.0])])
            .profile(ActionCategory::KeyPass, 0.2, &[(1.0, [70.0, yy(55.0)], [6.0, 8.0])])
    };
    out.push(
        dm("L", 58.0, |y| y)
            .stats((6.78, 0.64), 0.09, 0.77, 0.07, 0.74, 0.345, 0.305)
            .build(),
    );
    out.push(
        dm("R", 42.0, |y| 100.0 - y)
            .stats((6.70, 0.59), 0.05, 0.80, 0.05, 0.78, 0.355, 0.305)
            .build(),
    );
    out.push(
        ArchetypeBuilder::new(CentralMidfielder, "Wide Midfielder", StartPosition::SideMidfielder, [55.0, 50.0], 26.0)
            .profile(
                Dribble,
                2.6,
                &[(0.5, [58.0, 80.0], [6.0, 6.0]), (0.5, [58.0, 20.0], [6.0, 6.0])],
            )
            .profile(
                Recovery,
                2.6,
                &[(0.5, [48.0, 78.0], [6.0, 7.0]), (0.5, [48.0, 22.0], [6.0, 7.0])],
            )
            .profile(
                LongPass,
                1.6,
                &[(0.5, [48.0, 78.0], [7.0, 7.0]), (0.5, [48.0, 22.0], [7.0, 7.0])],
            )
            .profile(Header, 1.6, &[(1.0, [72.0, 50.0], [5.0, 8.0])])
            .profile(
                KeyPass,
                0.5,
                &[(0.5, [74.0, 60.0], [6.0, 8.0]), (0.5, [74.0, 40.0], [6.0, 8.0])],
            )
            .stats((6.85, 0.75), 0.14, 1.17, 0.15, 0.69, 0.38, 0.30)
            .build(),
    );

    // Wing forwards, anchors (68, 78) and (68, 22).
    let winger = |left: bool| {
        let style: &'static str = if left { "L Winger" } else { "R Winger" };
        let blobs_shot = [(1.0, [85.0, 63.0], [5.0, 6.0])];
        let blobs_cross = [(0.6, [88.0, 86.0], [4.0, 5.0]), (0.4, [72.0, 84.0], [5.0, 6.0])];
        let blobs_dribble = [(1.0, [66.0, 82.0], [6.0, 6.0])];
        let blobs_keypass = [(0.6, [82.0, 80.0], [5.0, 6.0]), (0.4, [75.0, 70.0], [6.0, 7.0])];
        let flip = |blobs: &[(f64, [f64; 2], [f64; 2])]| {
            if left {
                blobs.to_vec()
            } else {
                mirror_blobs(blobs)
            }
        };
        let anchor_y = if left { 78.0 } else { 22.0 };
        ArchetypeBuilder::new(WingForward, style, StartPosition::SideMidfielder, [68.0, anchor_y], 22.0)
            .profile(ActionCategory::Shot, 1.6, &flip(&blobs_shot))
            .profile(ActionCategory::Cross, 2.6, &flip(&blobs_cross))
            .profile(ActionCategory::Dribble, 2.8, &flip(&blobs_dribble))
            .profile(ActionCategory::KeyPass, 0.7, &flip(&blobs_keypass))
    };
    out.push(
        winger(true)
            .stats((6.92, 0.80), 0.19, 1.59, 0.16, 0.70, 0.365, 0.30)
            .build(),
    );
    out.push(
        winger(false)
            .stats((6.85, 0.75), 0.18, 1.46, 0.14, 0.76, 0.355, 0.305)
            .build(),
    );
    // Inside forwards share one style name across mirrored variants.
    let inside_forward = |left: bool| {
        let blobs_shot = [(0.6, [92.0, 55.0], [4.0, 6.0]), (0.4, [76.0, 55.0], [5.0, 7.0])];
        let blobs_dribble = [(1.0, [64.0, 58.0], [6.0, 8.0])];
        let blobs_cross = [(1.0, [86.0, 84.0], [4.0, 5.0])];
        let blobs_keypass = [(1.0, [78.0, 62.0], [6.0, 7.0])];
        let flip = |blobs: &[(f64, [f64; 2], [f64; 2])]| {
            if left {
                blobs.to_vec()
            } else {
                mirror_blobs(blobs)
            }
        };
        let anchor_y = if left { 78.0 } else { 22.0 };
        ArchetypeBuilder::new(WingForward, "Inside Forward", StartPosition::Forward, [68.0, anchor_y], 22.0)
            .profile(ActionCategory::Shot, 3.2, &flip(&blobs_shot))
            .profile(ActionCategory::Dribble, 3.2, &flip(&blobs_dribble))
            .profile(ActionCategory::Cross, 0.15, &flip(&blobs_cross))
            .profile(ActionCategory::KeyPass, 0.9, &flip(&blobs_keypass))
    };
    out.push(
        inside_forward(true)
            .stats((7.01, 0.87), 0.24, 2.03, 0.14, 0.51, 0.35, 0.305)
            .build(),
    );
    out.push(
        inside_forward(false)
            .stats((7.01, 0.87), 0.24, 2.03, 0.14, 0.51, 0.35, 0.305)
            .build(),
    );

    // Full backs, anchors (35, 80) and (35, 20).
    let wing_back = |left: bool| {
        let style: &'static str = if left { "L Wing Back" } else { "R Wing Back" };
        let blobs_cross = [(0.5, [86.0, 86.0], [4.0, 5.0]), (0.5, [68.0, 84.0], [5.0, 6.0])];
        let blobs_dribble = [(1.0, [52.0, 83.0], [7.0, 6.0])];
        let blobs_recovery = [(1.0, [34.0, 80.0], [6.0, 6.0])];
        let blobs_intercept = [(1.0, [32.0, 78.0], [6.0, 6.0])];
        let flip = |blobs: &[(f64, [f64; 2], [f64; 2])]| {
            if left {
                blobs.to_vec()
            } else {
                mirror_blobs(blobs)
            }
        };
        let anchor_y = if left { 80.0 } else { 20.0 };
        ArchetypeBuilder::new(FullBack, style, StartPosition::SideDefender, [35.0, anchor_y], 22.0)
            .profile(ActionCategory::Cross, 1.9, &flip(&blobs_cross))
            .profile(ActionCategory::Dribble, 2.3, &flip(&blobs_dribble))
            .profile(ActionCategory::Recovery, 1.6, &flip(&blobs_recovery))
            .profile(ActionCategory::Interception, 1.3, &flip(&blobs_intercept))
    };
    out.push(
        wing_back(true)
            .stats((6.70, 0.57), 0.01, 0.40, 0.07, 0.99, 0.355, 0.30)
            .build(),
    );
    out.push(
        wing_back(false)
            .stats((6.65, 0.59), 0.02, 0.35, 0.06, 0.98, 0.35, 0.30)
            .build(),
    );
    let back = |left: bool| {
        let style: &'static str = if left { "L Back" } else { "R Back" };
        let blobs_dribble = [(1.0, [32.0, 78.0], [5.0, 6.0])];
        let blobs_recovery = [(1.0, [30.0, 78.0], [6.0, 6.0])];
        let blobs_intercept = [(1.0, [28.0, 76.0], [6.0, 6.0])];
        let blobs_cross = [(1.0, [60.0, 85.0], [6.0, 5.0])];
        let blobs_clear = [(1.0, [15.0, 70.0], [5.0, 6.0])];
        let flip = |blobs: &[(f64, [f64; 2], [f64; 2])]| {
            if left {
                blobs.to_vec()
            } else {
                mirror_blobs(blobs)
            }
        };
        let anchor_y = if left { 80.0 } else { 20.0 };
        ArchetypeBuilder::new(FullBack, style, StartPosition::SideDefender, [35.0, anchor_y], 20.0)
            .profile(ActionCategory::Dribble, 1.3, &flip(&blobs_dribble))
            .profile(ActionCategory::Recovery, 2.6, &flip(&blobs_recovery))
            .profile(ActionCategory::Interception, 1.9, &flip(&blobs_intercept))
            .profile(ActionCategory::Cross, 0.3, &flip(&blobs_cross))
            .profile(ActionCategory::Clearance, 1.1, &flip(&blobs_clear))
    };
    out.push(
        back(true)
            .stats((6.64, 0.54), 0.04, 0.51, 0.05, 0.88, 0.32, 0.29)
            .build(),
    );
    out.push(
        back(false)
            .stats((6.54, 0.59), 0.03, 0.38, 0.04, 0.93, 0.335, 0.295)
            .build(),
    );

    // Center backs, anchor (25, 50).
    let bpd = |left: bool| {
        let style: &'static str = if left {
            "L Ball Playing Defender"
        } else {
            "R Ball Playing Defender"
        };
        let blobs_dribble = [(1.0, [25.0, 58.0], [5.0, 6.0])];
        let blobs_longpass = [(1.0, [28.0, 60.0], [7.0, 8.0])];
        let blobs_clear = [(1.0, [14.0, 58.0], [5.0, 6.0])];
        let blobs_header = [(1.0, [22.0, 56.0], [5.0, 6.0])];
        let blobs_intercept = [(1.0, [26.0, 58.0], [6.0, 6.0])];
        let flip = |blobs: &[(f64, [f64; 2], [f64; 2])]| {
            if left {
                blobs.to_vec()
            } else {
                mirror_blobs(blobs)
            }
        };
        ArchetypeBuilder::new(CenterBack, style, StartPosition::CenterDefender, [25.0, 50.0], 24.0)
            .profile(ActionCategory::Dribble, 1.1, &flip(&blobs_dribble))
            .profile(ActionCategory::LongPass, 2.8, &flip(&blobs_longpass))
            .profile(ActionCategory::Clearance, 0.9, &flip(&blobs_clear))
            .profile(ActionCategory::Header, 1.3, &flip(&blobs_header))
            .profile(ActionCategory::Interception, 1.4, &flip(&blobs_intercept))
    };
    out.push(
        bpd(true)
            .stats((6.68, 0.61), 0.04, 0.39, 0.02, 0.71, 0.34, 0.305)
            .build(),
    );
    out.push(
        bpd(false)
            .stats((6.60, 0.59), 0.03, 0.31, 0.01, 0.81, 0.345, 0.305)
            .build(),
    );
    out.push(
        ArchetypeBuilder::new(CenterBack, "Central Defender", StartPosition::CenterDefender, [25.0, 50.0], 14.0)
            .profile(
                Clearance,
                3.2,
                &[
                    (0.4, [12.0, 50.0], [4.0, 6.0]),
                    (0.2, [15.0, 68.0], [5.0, 6.0]),
                    (0.2, [15.0, 32.0], [5.0, 6.0]),
                    (0.2, [8.0, 50.0], [3.0, 6.0]),
                ],
            )
            .profile(
                Header,
                2.8,
                &[
                    (0.6, [20.0, 50.0], [5.0, 7.0]),
                    (0.2, [22.0, 60.0], [5.0, 6.0]),
                    (0.2, [22.0, 40.0], [5.0, 6.0]),
                ],
            )
            .profile(
                Interception,
                1.6,
                &[(0.5, [28.0, 60.0], [6.0, 6.0]), (0.5, [28.0, 40.0], [6.0, 6.0])],
            )
            .profile(Dribble, 0.4, &[(1.0, [24.0, 50.0], [5.0, 7.0])])
            .profile(LongPass, 0.9, &[(1.0, [26.0, 50.0], [7.0, 8.0])])
            .stats((6.80, 0.63), 0.03, 0.30, 0.02, 0.74, 0.42, 0.33)
            .build(),
    );

    out
}

/// One planted player and their fixed per-season attributes.
#[derive(Debug, Clone)]
struct Player {
    id: String,
    team: String,
    archetype: usize,
    nationality: Nationality,
}

/// Planted ground truth of one eligible player-match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub player_id: String,
    pub match_id: String,
    pub position: PositionLabel,
    pub style: String,
}

/// The generated season as written to disk.
#[derive(Debug, Clone)]
pub struct League {
    pub events: Vec<MatchEvent>,
    pub records: Vec<PlayerMatchRecord>,
    pub truth: Vec<TruthRow>,
}

pub struct LeaguePaths {
    pub events: PathBuf,
    pub records: PathBuf,
    pub truth: PathBuf,
}

fn sample_location(rng: &mut ChaCha8Rng, profile: &CategoryProfile) -> PitchPoint {
    let total: f64 = profile.blobs.iter().map(|b| b.weight).sum();
    let mut t = rng.random::<f64>() * total;
    let mut blob = &profile.blobs[profile.blobs.len() - 1];
    for b in &profile.blobs {
        t -= b.weight;
        if t <= 0.0 {
            blob = b;
            break;
        }
    }
    let nx = Normal::new(blob.mean[0], blob.std[0].max(1e-9)).expect("validated std");
    let ny = Normal::new(blob.mean[1], blob.std[1].max(1e-9)).expect("validated std");
    for _ in 0..64 {
        let x = nx.sample(rng);
        let y = ny.sample(rng);
        if (0.0..=100.0).contains(&x) && (0.0..=100.0).contains(&y) {
            return PitchPoint { x, y };
        }
    }
    PitchPoint {
        x: blob.mean[0].clamp(0.0, 100.0),
        y: blob.mean[1].clamp(0.0, 100.0),
    }
}

fn poisson_count(rng: &mut ChaCha8Rng, rate: f64) -> u32 {
    if rate <= 0.0 {
        return 0;
    }
    Poisson::new(rate).expect("positive rate").sample(rng) as u32
}

/// Wire raw type for a generated event of one category.
fn raw_type_for(category: ActionCategory) -> RawEventType {
    let (name, result) = match category {
        ActionCategory::Shot => ("Shot", "On target"),
        ActionCategory::Cross => ("Cross", "Successful"),
        ActionCategory::Pass => ("Simple pass", "Successful"),
        ActionCategory::LongPass => ("Long pass", "Successful"),
        ActionCategory::KeyPass => ("Simple pass", "Keypass"),
        ActionCategory::Dribble => ("Dribble", "Successful"),
        ActionCategory::Interception => ("Interception", "Successful"),
        ActionCategory::Clearance => ("Clearance", "Successful"),
        ActionCategory::Header => ("Aerial duel", "Successful"),
        ActionCategory::Recovery => ("Ball recovery", "Successful"),
    };
    RawEventType::new(name, result, "Simple").expect("vocabulary")
}

fn push_event(
    events: &mut Vec<MatchEvent>,
    mapping: &CategoryMapping,
    match_id: &str,
    player: &Player,
    raw_type: RawEventType,
    minute: u32,
    location: PitchPoint,
) {
    let category = mapping.base_category(&raw_type).expect("vocabulary");
    events.push(MatchEvent {
        match_id: match_id.to_string(),
        player_id: player.id.clone(),
        team_id: player.team.clone(),
        minute,
        half: if minute < 45 { 1 } else { 2 },
        raw_type,
        category,
        location,
    });
}

fn generate_matchday(
    spec: &LeagueSpec,
    players: &[Player],
    matchday: usize,
) -> (Vec<MatchEvent>, Vec<PlayerMatchRecord>, Vec<TruthRow>) {
    let mapping = CategoryMapping::default();
    let match_id = format!("m{matchday:03}");
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &format!("synth.matchday.{matchday}")));

    let mut events = Vec::new();
    let mut records = Vec::new();
    let mut truth = Vec::new();

    for player in players {
        let archetype = &spec.archetypes[player.archetype];

        let u: f64 = rng.random();
        let minutes: f64 = if u < 0.01 {
            45.0
        } else if u < 0.02 {
            rng.random_range(20..45) as f64
        } else if u < 0.07 {
            rng.random_range(46..90) as f64
        } else {
            90.0
        };
        let share = minutes / 90.0;

        let mut player_events = Vec::new();
        for (&category, profile) in &archetype.profiles {
            let count = poisson_count(&mut rng, profile.rate * share);
            for _ in 0..count {
                let minute = rng.random_range(0..90u32);
                let location = sample_location(&mut rng, profile);
                player_events.push((minute, raw_type_for(category), location));
            }
        }
        // Uncategorized texture: touches everywhere the player acts, the
        // occasional booking.
        let touches = poisson_count(&mut rng, 4.0 * share);
        if let Some(pass) = archetype.profiles.get(&ActionCategory::Pass) {
            for _ in 0..touches {
                let minute = rng.random_range(0..90u32);
                let location = sample_location(&mut rng, pass);
                player_events.push((
                    minute,
                    RawEventType::new("Touch", "Successful", "Simple").expect("vocabulary"),
                    location,
                ));
            }
            if rng.random::<f64>() < 0.15 {
                let minute = rng.random_range(0..90u32);
                let location = sample_location(&mut rng, pass);
                player_events.push((
                    minute,
                    RawEventType::new("Yellow card", "", "Simple").expect("vocabulary"),
                    location,
                ));
            }
        }
        player_events.sort_by_key(|(minute, _, _)| *minute);
        for (minute, raw, location) in player_events {
            push_event(&mut events, &mapping, &match_id, player, raw, minute, location);
        }

        let rating_draw = Normal::new(archetype.rating_mean, archetype.rating_sd.max(1e-9))
            .expect("validated sd")
            .sample(&mut rng);
        let rating = (rating_draw.clamp(4.0, 10.0) * 100.0).round() / 100.0;
        let outcome_draw: f64 = rng.random();
        let outcome = if outcome_draw < archetype.win_p {
            MatchOutcome::Win
        } else if outcome_draw < archetype.win_p + archetype.draw_p {
            MatchOutcome::Draw
        } else {
            MatchOutcome::Loss
        };
        records.push(PlayerMatchRecord {
            match_id: match_id.clone(),
            player_id: player.id.clone(),
            minutes_played: minutes,
            start_position: archetype.start_position,
            rating,
            goals: poisson_count(&mut rng, archetype.goals_rate),
            shots: poisson_count(&mut rng, archetype.shots_rate),
            assists: poisson_count(&mut rng, archetype.assists_rate),
            nationality: player.nationality,
            outcome,
        });
        if minutes > 45.0 {
            truth.push(TruthRow {
                player_id: player.id.clone(),
                match_id: match_id.clone(),
                position: archetype.position,
                style: archetype.style.clone(),
            });
        }
    }

    // One goalkeeper per team: excluded downstream, present in the files.
    for team in 0..spec.teams {
        let gk = Player {
            id: format!("gk{team:02}"),
            team: format!("t{team:02}"),
            archetype: usize::MAX,
            nationality: Nationality::Domestic,
        };
        for _ in 0..2 {
            let minute = rng.random_range(0..90u32);
            push_event(
                &mut events,
                &mapping,
                &match_id,
                &gk,
                RawEventType::new("Keeper save", "Successful", "Simple").expect("vocabulary"),
                minute,
                PitchPoint {
                    x: (3.0 + rng.random::<f64>() * 4.0),
                    y: 40.0 + rng.random::<f64>() * 20.0,
                },
            );
        }
        let draw: f64 = Normal::new(6.5, 0.5).unwrap().sample(&mut rng);
        let rating = (draw.clamp(4.0, 10.0) * 100.0).round() / 100.0;
        records.push(PlayerMatchRecord {
            match_id: match_id.clone(),
            player_id: gk.id,
            minutes_played: 90.0,
            start_position: StartPosition::Goalkeeper,
            rating,
            goals: 0,
            shots: 0,
            assists: 0,
            nationality: Nationality::Domestic,
            outcome: MatchOutcome::Draw,
        });
    }

    (events, records, truth)
}

/// Generates the in-memory season. Deterministic for a fixed spec.
pub fn generate_league(spec: &LeagueSpec) -> Result<League> {
    spec.validate()?;

    let mut player_rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "synth.players"));
    let mut players = Vec::new();
    for (ai, archetype) in spec.archetypes.iter().enumerate() {
        for i in 0..spec.players_per_archetype {
            let team = (players.len()) % spec.teams;
            players.push(Player {
                id: format!("p{ai:02}-{i:02}"),
                team: format!("t{team:02}"),
                archetype: ai,
                nationality: if player_rng.random::<f64>() < archetype.domestic_share {
                    Nationality::Domestic
                } else {
                    Nationality::Foreign
                },
            });
        }
    }

    let per_day: Vec<(Vec<MatchEvent>, Vec<PlayerMatchRecord>, Vec<TruthRow>)> = (0..spec.matchdays)
        .into_par_iter()
        .map(|d| generate_matchday(spec, &players, d))
        .collect();

    let mut league = League {
        events: Vec::new(),
        records: Vec::new(),
        truth: Vec::new(),
    };
    for (events, records, truth) in per_day {
        league.events.extend(events);
        league.records.extend(records);
        league.truth.extend(truth);
    }
    Ok(league)
}

pub const TRUTH_HEADER: [&str; 4] = ["player_id", "match_id", "position", "style"];

pub fn write_truth(path: &Path, truth: &[TruthRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRUTH_HEADER)?;
    for row in truth {
        w.write_record([
            row.player_id.as_str(),
            row.match_id.as_str(),
            row.position.as_str(),
            row.style.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_truth(path: &Path) -> Result<Vec<TruthRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut out = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        let row = row?;
        let line = idx as u64 + 2;
        let position = PositionLabel::parse(row.get(2).unwrap_or("")).ok_or_else(|| {
            Error::MalformedRecord {
                path: path.to_path_buf(),
                line,
                reason: format!("bad position `{}`", row.get(2).unwrap_or("")),
            }
        })?;
        out.push(TruthRow {
            player_id: row.get(0).unwrap_or("").to_string(),
            match_id: row.get(1).unwrap_or("").to_string(),
            position,
            style: row.get(3).unwrap_or("").to_string(),
        });
    }
    Ok(out)
}

/// Generates a season and writes the three files: `events.csv`,
/// `records.csv` (ingestion wire formats) and `truth.csv`.
pub fn generate_season(spec: &LeagueSpec, out_dir: &Path) -> Result<LeaguePaths> {
    let league = generate_league(spec)?;
    std::fs::create_dir_all(out_dir)?;
    let paths = LeaguePaths {
        events: out_dir.join("events.csv"),
        records: out_dir.join("records.csv"),
        truth: out_dir.join("truth.csv"),
    };
    write_events_csv(&paths.events, &league.events)?;
    write_player_records(&paths.records, &league.records)?;
    write_truth(&paths.truth, &league.truth)?;
    Ok(paths)
}

/// Truth keyed for joins.
pub fn truth_by_key(truth: &[TruthRow]) -> BTreeMap<PlayerMatchKey, &TruthRow> {
    truth
        .iter()
        .map(|t| (PlayerMatchKey::new(&t.match_id, &t.player_id), t))
        .collect()
}
