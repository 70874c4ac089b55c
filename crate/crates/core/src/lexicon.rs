//! Trait vocabulary and the zodiac-to-trait assignment table.
//!
//! The lexicon is a fixed list of 100 ordinary personality descriptors.
//! Each of the twelve signs gets ten of them; the sets overlap on purpose
//! (every assigned trait belongs to one, two or three signs) so that no sign
//! owns a clean region of trait space.

use std::fmt;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of descriptors in the trait pool.
pub const TRAIT_COUNT: usize = 100;
/// Number of traits attached to each sign.
pub const TRAITS_PER_SIGN: usize = 10;
/// Number of zodiac signs.
pub const SIGN_COUNT: usize = 12;

/// Index of a descriptor in the lexicon, in `0..TRAIT_COUNT`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TraitId(u8);

impl TraitId {
    pub fn new(index: usize) -> Option<TraitId> {
        (index < TRAIT_COUNT).then_some(TraitId(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// All trait ids in ascending order.
    pub fn all() -> impl Iterator<Item = TraitId> {
        (0..TRAIT_COUNT as u8).map(TraitId)
    }
}

impl fmt::Display for TraitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The twelve tropical zodiac signs. The ordinal (`Aries = 0` through
/// `Pisces = 11`) is fixed and used for one-hot encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ZodiacSign {
    Aries,
    Taurus,
    Gemini,
    Cancer,
    Leo,
    Virgo,
    Libra,
    Scorpio,
    Sagittarius,
    Capricorn,
    Aquarius,
    Pisces,
}

impl ZodiacSign {
    pub const ALL: [ZodiacSign; SIGN_COUNT] = [
        ZodiacSign::Aries,
        ZodiacSign::Taurus,
        ZodiacSign::Gemini,
        ZodiacSign::Cancer,
        ZodiacSign::Leo,
        ZodiacSign::Virgo,
        ZodiacSign::Libra,
        ZodiacSign::Scorpio,
        ZodiacSign::Sagittarius,
        ZodiacSign::Capricorn,
        ZodiacSign::Aquarius,
        ZodiacSign::Pisces,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<ZodiacSign> {
        Self::ALL.get(ordinal).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ZodiacSign::Aries => "Aries",
            ZodiacSign::Taurus => "Taurus",
            ZodiacSign::Gemini => "Gemini",
            ZodiacSign::Cancer => "Cancer",
            ZodiacSign::Leo => "Leo",
            ZodiacSign::Virgo => "Virgo",
            ZodiacSign::Libra => "Libra",
            ZodiacSign::Scorpio => "Scorpio",
            ZodiacSign::Sagittarius => "Sagittarius",
            ZodiacSign::Capricorn => "Capricorn",
            ZodiacSign::Aquarius => "Aquarius",
            ZodiacSign::Pisces => "Pisces",
        }
    }

    pub fn from_name(name: &str) -> Option<ZodiacSign> {
        Self::ALL.iter().copied().find(|s| s.name() == name)
    }

    /// The two calendar months a sign's date span touches, each paired with
    /// the number of days of the span falling in that month (non-leap year).
    /// The first month is the one the span starts in.
    pub fn month_span(self) -> [(u8, u8); 2] {
        match self {
            ZodiacSign::Aries => [(3, 11), (4, 19)],        // Mar 21 - Apr 19
            ZodiacSign::Taurus => [(4, 11), (5, 20)],       // Apr 20 - May 20
            ZodiacSign::Gemini => [(5, 11), (6, 20)],       // May 21 - Jun 20
            ZodiacSign::Cancer => [(6, 10), (7, 22)],       // Jun 21 - Jul 22
            ZodiacSign::Leo => [(7, 9), (8, 22)],           // Jul 23 - Aug 22
            ZodiacSign::Virgo => [(8, 9), (9, 22)],         // Aug 23 - Sep 22
            ZodiacSign::Libra => [(9, 8), (10, 22)],        // Sep 23 - Oct 22
            ZodiacSign::Scorpio => [(10, 9), (11, 21)],     // Oct 23 - Nov 21
            ZodiacSign::Sagittarius => [(11, 9), (12, 21)], // Nov 22 - Dec 21
            ZodiacSign::Capricorn => [(12, 10), (1, 19)],   // Dec 22 - Jan 19
            ZodiacSign::Aquarius => [(1, 12), (2, 18)],     // Jan 20 - Feb 18
            ZodiacSign::Pisces => [(2, 10), (3, 20)],       // Feb 19 - Mar 20
        }
    }

    pub fn contains_month(self, month: u8) -> bool {
        self.month_span().iter().any(|&(m, _)| m == month)
    }
}

impl fmt::Display for ZodiacSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[rustfmt::skip]
const DESCRIPTORS: [&str; TRAIT_COUNT] = [
    "Confident", "Reserved", "Ambitious", "Reflective", "Bold",
    "Practical", "Empathetic", "Independent", "Disciplined", "Dreamy",
    "Quiet", "Curious", "Impulsive", "Energetic", "Analytical",
    "DetailOriented", "Emotional", "Social", "Loyal", "Stubborn",
    "Patient", "Sensual", "Reliable", "Adaptable", "Witty",
    "Talkative", "Restless", "Nurturing", "Protective", "Moody",
    "Intuitive", "Generous", "Dramatic", "Proud", "Warm",
    "Charismatic", "Critical", "Modest", "Diplomatic", "Charming",
    "Indecisive", "Harmonious", "Intense", "Passionate", "Secretive",
    "Jealous", "Optimistic", "Adventurous", "Honest", "Philosophical",
    "Responsible", "Cautious", "Pragmatic", "Original", "Humanitarian",
    "Aloof", "Inventive", "Compassionate", "Artistic", "Sensitive",
    "Escapist", "Anxious", "Competitive", "Courageous", "Sincere",
    "Cheerful", "Creative", "Organized", "Perfectionist", "Gentle",
    "Kind", "Fair", "Determined", "Resourceful", "Funny",
    "Thoughtful", "Rebellious", "Visionary", "Tolerant", "Humble",
    "Calm", "Friendly", "Playful", "Logical", "Spontaneous",
    "Assertive", "Decisive", "Meticulous", "Romantic", "Idealistic",
    "Eccentric", "Stoic", "Forgiving", "Observant", "Persistent",
    "Sentimental", "Hardworking", "Impatient", "Flexible", "Enthusiastic",
];

// Stereotype sets in sign ordinal order.
#[rustfmt::skip]
const STEREOTYPES: [[&str; TRAITS_PER_SIGN]; SIGN_COUNT] = [
    ["Confident", "Impulsive", "Energetic", "Bold", "Ambitious",
     "Courageous", "Assertive", "Restless", "Passionate", "Independent"],
    ["Patient", "Reliable", "Practical", "Stubborn", "Romantic",
     "Loyal", "Determined", "Calm", "Persistent", "Hardworking"],
    ["Curious", "Charming", "Talkative", "Adaptable", "Social",
     "Restless", "Funny", "Spontaneous", "Energetic", "Indecisive"],
    ["Emotional", "Compassionate", "Protective", "Intuitive", "Reserved",
     "Loyal", "Sensitive", "Sentimental", "Empathetic", "Cautious"],
    ["Confident", "Dramatic", "Generous", "Ambitious", "Optimistic",
     "Charismatic", "Bold", "Social", "Passionate", "Creative"],
    ["Analytical", "DetailOriented", "Practical", "Critical", "Reliable",
     "Disciplined", "Perfectionist", "Meticulous", "Hardworking", "Reserved"],
    ["Diplomatic", "Charming", "Indecisive", "Harmonious", "Artistic",
     "Social", "Romantic", "Idealistic", "Friendly", "Creative"],
    ["Intense", "Passionate", "Secretive", "Jealous", "Determined",
     "Loyal", "Emotional", "Intuitive", "Stubborn", "Bold"],
    ["Optimistic", "Adventurous", "Honest", "Idealistic", "Independent",
     "Curious", "Restless", "Enthusiastic", "Spontaneous", "Funny"],
    ["Disciplined", "Responsible", "Ambitious", "Practical", "Cautious",
     "Reserved", "Persistent", "Reliable", "Determined", "Hardworking"],
    ["Original", "Compassionate", "Independent", "Aloof", "Inventive",
     "Rebellious", "Visionary", "Eccentric", "Analytical", "Curious"],
    ["Dreamy", "Compassionate", "Artistic", "Sensitive", "Intuitive",
     "Escapist", "Emotional", "Empathetic", "Romantic", "Idealistic"],
];

/// Ordered list of the 100 trait descriptors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraitLexicon {
    descriptors: Vec<String>,
}

impl TraitLexicon {
    pub fn len(&self) -> usize {
        self.descriptors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.descriptors.is_empty()
    }

    pub fn descriptors(&self) -> &[String] {
        &self.descriptors
    }

    pub fn descriptor(&self, id: TraitId) -> &str {
        &self.descriptors[id.index()]
    }

    /// Exact-match lookup.
    pub fn id_of(&self, name: &str) -> Option<TraitId> {
        self.descriptors
            .iter()
            .position(|d| d == name)
            .and_then(TraitId::new)
    }

    /// Builds a lexicon from arbitrary descriptors, checking the size and
    /// case-folded uniqueness invariants.
    pub fn from_descriptors(descriptors: Vec<String>) -> Result<TraitLexicon> {
        if descriptors.len() != TRAIT_COUNT {
            return Err(Error::Format {
                what: "lexicon",
                message: format!("expected {TRAIT_COUNT} descriptors, found {}", descriptors.len()),
            });
        }
        let mut folded: Vec<String> = descriptors.iter().map(|d| d.to_lowercase()).collect();
        folded.sort();
        folded.dedup();
        if folded.len() != TRAIT_COUNT || descriptors.iter().any(|d| d.trim().is_empty()) {
            return Err(Error::Format {
                what: "lexicon",
                message: "descriptors must be unique and non-empty".into(),
            });
        }
        Ok(TraitLexicon { descriptors })
    }
}

/// The canonical 100-descriptor lexicon.
pub fn build_default_lexicon() -> TraitLexicon {
    TraitLexicon {
        descriptors: DESCRIPTORS.iter().map(|s| s.to_string()).collect(),
    }
}

/// Per-sign trait sets, each exactly ten ids in ascending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentTable {
    sets: [[TraitId; TRAITS_PER_SIGN]; SIGN_COUNT],
}

impl AssignmentTable {
    /// Builds a table from explicit per-sign sets. Each set is sorted; it
    /// must hold ten distinct ids and at least one id must be shared
    /// between two signs.
    pub fn from_sets(sets: [[TraitId; TRAITS_PER_SIGN]; SIGN_COUNT]) -> Result<AssignmentTable> {
        let mut sets = sets;
        for (sign, set) in ZodiacSign::ALL.iter().zip(sets.iter_mut()) {
            set.sort();
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Format {
                    what: "assignment table",
                    message: format!("{sign} has duplicate traits"),
                });
            }
        }
        let table = AssignmentTable { sets };
        let overlap = table.overlap_matrix();
        let shared = (0..SIGN_COUNT).any(|i| (0..SIGN_COUNT).any(|j| i != j && overlap[i][j] > 0));
        if !shared {
            return Err(Error::Format {
                what: "assignment table",
                message: "no trait is shared between signs".into(),
            });
        }
        Ok(table)
    }

    pub fn traits(&self, sign: ZodiacSign) -> &[TraitId; TRAITS_PER_SIGN] {
        &self.sets[sign.ordinal()]
    }

    pub fn contains(&self, sign: ZodiacSign, id: TraitId) -> bool {
        self.traits(sign).binary_search(&id).is_ok()
    }

    /// Number of signs each trait is assigned to.
    pub fn multiplicities(&self) -> [usize; TRAIT_COUNT] {
        let mut counts = [0; TRAIT_COUNT];
        for id in self.sets.iter().flatten() {
            counts[id.index()] += 1;
        }
        counts
    }

    /// Sorted union of all sign sets.
    pub fn union(&self) -> Vec<TraitId> {
        let mut all: Vec<TraitId> = self.sets.iter().flatten().copied().collect();
        all.sort();
        all.dedup();
        all
    }

    /// Entry `(i, j)` is the number of traits shared by signs `i` and `j`.
    pub fn overlap_matrix(&self) -> [[usize; SIGN_COUNT]; SIGN_COUNT] {
        let mut out = [[0; SIGN_COUNT]; SIGN_COUNT];
        for i in 0..SIGN_COUNT {
            for j in 0..SIGN_COUNT {
                // both sides are sorted, so a merge walk counts the intersection
                let (a, b) = (&self.sets[i], &self.sets[j]);
                let (mut x, mut y, mut n) = (0, 0, 0);
                while x < a.len() && y < b.len() {
                    match a[x].cmp(&b[y]) {
                        std::cmp::Ordering::Less => x += 1,
                        std::cmp::Ordering::Greater => y += 1,
                        std::cmp::Ordering::Equal => {
                            n += 1;
                            x += 1;
                            y += 1;
                        }
                    }
                }
                out[i][j] = n;
            }
        }
        out
    }
}

/// Resolves the stereotype sets against `lexicon`. Fails if any stereotype
/// descriptor is missing, which means the lexicon is not the canonical one.
pub fn build_default_assignments(lexicon: &TraitLexicon) -> Result<AssignmentTable> {
    let mut sets = [[TraitId(0); TRAITS_PER_SIGN]; SIGN_COUNT];
    for (set, names) in sets.iter_mut().zip(STEREOTYPES.iter()) {
        for (slot, name) in set.iter_mut().zip(names.iter()) {
            *slot = lexicon
                .id_of(name)
                .ok_or_else(|| Error::MissingDescriptor(name.to_string()))?;
        }
    }
    AssignmentTable::from_sets(sets)
}

/// JSON export of the lexicon and its assignment table:
/// `{"descriptors": [...], "assignments": {"Aries": [...], ...}}` with signs
/// in ordinal order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LexiconDocument {
    pub descriptors: Vec<String>,
    pub assignments: SignSets,
}

/// Sign-name keyed trait lists, serialized in sign ordinal order.
#[derive(Clone, Debug, PartialEq)]
pub struct SignSets(pub Vec<(ZodiacSign, Vec<usize>)>);

impl Serialize for SignSets {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (sign, ids) in &self.0 {
            map.serialize_entry(sign.name(), ids)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SignSets {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SetsVisitor;
        impl<'de> Visitor<'de> for SetsVisitor {
            type Value = SignSets;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from sign name to trait ids")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> std::result::Result<SignSets, A::Error> {
                let mut out = Vec::new();
                while let Some((name, ids)) = access.next_entry::<String, Vec<usize>>()? {
                    let sign = ZodiacSign::from_name(&name)
                        .ok_or_else(|| de::Error::custom(format!("unknown sign `{name}`")))?;
                    out.push((sign, ids));
                }
                Ok(SignSets(out))
            }
        }
        deserializer.deserialize_map(SetsVisitor)
    }
}

impl LexiconDocument {
    pub fn new(lexicon: &TraitLexicon, table: &AssignmentTable) -> LexiconDocument {
        LexiconDocument {
            descriptors: lexicon.descriptors().to_vec(),
            assignments: SignSets(
                ZodiacSign::ALL
                    .iter()
                    .map(|&s| (s, table.traits(s).iter().map(|t| t.index()).collect()))
                    .collect(),
            ),
        }
    }

    /// Rebuilds and re-validates the lexicon and table.
    pub fn into_parts(self) -> Result<(TraitLexicon, AssignmentTable)> {
        let lexicon = TraitLexicon::from_descriptors(self.descriptors)?;
        let bad = |message: String| Error::Format { what: "lexicon document", message };
        let mut sets = [[TraitId(0); TRAITS_PER_SIGN]; SIGN_COUNT];
        let mut seen = [false; SIGN_COUNT];
        for (sign, ids) in self.assignments.0 {
            if ids.len() != TRAITS_PER_SIGN {
                return Err(bad(format!("{sign} has {} traits", ids.len())));
            }
            for (slot, &id) in sets[sign.ordinal()].iter_mut().zip(&ids) {
                *slot = TraitId::new(id).ok_or_else(|| bad(format!("trait id {id} out of range")))?;
            }
            seen[sign.ordinal()] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(bad(format!("no entry for {}", ZodiacSign::ALL[missing])));
        }
        Ok((lexicon, AssignmentTable::from_sets(sets)?))
    }
}
