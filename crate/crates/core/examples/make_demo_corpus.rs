//! Regenerates the bundled demo corpus at `assets/demo/corpus.jsonl`.
//!
//! Each record holds a structured event sequence, a reference article, and
//! the keywords that seed the baseline generator. Reference articles are
//! built from the same events as the rule output, but through per-sentence
//! frame variants, varied (or omitted) discourse markers, and a variation
//! vocabulary distinct from the paraphraser's lexicon — so they read like
//! an edited human version of the same facts rather than a template dump.
//!
//! Run from anywhere: `cargo run -p newsgen-core --example make_demo_corpus`

use std::collections::BTreeSet;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use newsgen_core::corpus::{save_corpus, CorpusRecord};
use newsgen_core::event::{EventSequence, StructuredEvent};
use newsgen_core::paraphrase::{
    paraphrase_document, LexicalParaphraser, SynonymLexicon, TransformRule,
};
use newsgen_core::pipeline::fnv1a64;
use newsgen_core::realize::realize;
use newsgen_core::template::{parse_template_set, TemplateSet};

const RECORD_COUNT: usize = 900;
const CORPUS_SEED: u64 = 2024_0001;

const ORGS: [&str; 16] = [
    "the city council",
    "the health ministry",
    "the transport agency",
    "the housing board",
    "the finance committee",
    "the school authority",
    "the water department",
    "the port authority",
    "the labor office",
    "the culture board",
    "the energy agency",
    "the parks committee",
    "the police department",
    "the tourism office",
    "the planning office",
    "the fire service",
];

const PERSON_TITLES: [&str; 3] = ["mayor", "chancellor", "minister"];

const NAMES: [&str; 24] = [
    "Scholz",
    "Varga",
    "Lindqvist",
    "Okafor",
    "Marchetti",
    "Dubois",
    "Novak",
    "Petrova",
    "Iversen",
    "Kowalski",
    "Tanaka",
    "Moreau",
    "Almeida",
    "Bergström",
    "Castellano",
    "Demir",
    "Eriksen",
    "Fontaine",
    "Grigoryan",
    "Haugen",
    "Ibrahim",
    "Jansen",
    "Keller",
    "Larsson",
];

const COUNTRIES: [&str; 4] = ["Germany", "Austria", "Denmark", "Poland"];

const VERBS: [&str; 14] = [
    "approved",
    "announced",
    "extended",
    "suspended",
    "launched",
    "confirmed",
    "rejected",
    "reviewed",
    "backed",
    "opened",
    "delayed",
    "presented",
    "expanded",
    "adopted",
];

const NEW_THINGS: [&str; 14] = [
    "testing scheme",
    "bus route",
    "housing project",
    "recycling programme",
    "heating plan",
    "safety campaign",
    "training course",
    "repair schedule",
    "funding round",
    "market hall",
    "cycle lane",
    "water pipeline",
    "school building",
    "festival programme",
];

const THE_THINGS: [&str; 8] = [
    "annual budget",
    "winter timetable",
    "emergency plan",
    "renovation works",
    "vaccination drive",
    "traffic rules",
    "park upgrade",
    "harbor contract",
];

const COUNTED_THINGS: [&str; 6] = ["cases", "permits", "apartments", "jobs", "trees", "buses"];

const FUNDED_PLACES: [&str; 5] = ["schools", "clinics", "libraries", "shelters", "museums"];

const AREAS: [&str; 16] = [
    "Berlin",
    "Hamburg",
    "Bremen",
    "Dresden",
    "Leipzig",
    "the northern district",
    "the harbor quarter",
    "the old town",
    "Frankfurt",
    "Stuttgart",
    "the eastern suburbs",
    "Cologne",
    "Potsdam",
    "the city centre",
    "the river ward",
    "Hanover",
];

const WEEKDAYS: [&str; 7] = [
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
    "Sunday",
];

const MONTHS: [&str; 12] = [
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

const PLAIN_REASONS: [&str; 15] = [
    "cases rose sharply",
    "demand kept climbing",
    "the budget review ended",
    "residents filed complaints",
    "costs fell under the plan",
    "inspections found faults",
    "the old contract expired",
    "winter weather caused damage",
    "attendance doubled last season",
    "bookings hit a record",
    "the pilot phase went well",
    "supplies ran short",
    "turnout stayed low",
    "prices kept rising",
    "the works fell behind",
];

const PURPOSE_VERBS: [&str; 10] = [
    "to curb",
    "to support",
    "to speed up",
    "to cut",
    "to protect",
    "to ease",
    "to save",
    "to attract",
    "to secure",
    "to improve",
];

const PURPOSE_OBJECTS: [&str; 12] = [
    "the outbreak",
    "local businesses",
    "waiting times",
    "older residents",
    "rush hour traffic",
    "energy use",
    "more visitors",
    "road safety",
    "water quality",
    "school meals",
    "winter services",
    "air quality",
];

/// Discourse markers used by reference articles; distinct from both the
/// rule templates' pool and the paraphraser's swap targets, and single
/// words so no marker dominates the learned transitions.
const HUMAN_CONNECTIVES: [&str; 6] = [
    "Meanwhile,",
    "Separately,",
    "Later,",
    "Additionally,",
    "Elsewhere,",
    "Relatedly,",
];

/// Sentence frames for reference articles. Each variant orders the same
/// facts differently; the first applicable template in each set wins, so
/// every set falls back to a plain subject-verb-object pattern.
const REFERENCE_FRAMES: [&str; 4] = [
    // area first
    r#"
    template area_front { pattern: "In {area}, {subject} {verb} {object}[ {purpose}][ because {reason}]."; requires: subject, verb, object, area }
    template plain { pattern: "{subject} {verb} {object}[ {purpose}][ because {reason}]."; requires: subject, verb, object }
    template bare { pattern: "{subject} {verb}."; requires: subject, verb }
    "#,
    // date first, purpose after the reason
    r#"
    template date_front { pattern: "On {date}, {subject} {verb} {object}[ in {area}][ because {reason}][ {purpose}]."; requires: subject, verb, object, date }
    template plain { pattern: "{subject} {verb} {object}[ because {reason}][ {purpose}]."; requires: subject, verb, object }
    template bare { pattern: "{subject} {verb}."; requires: subject, verb }
    "#,
    // reason first
    r#"
    template reason_front { pattern: "Because {reason}, {subject} {verb} {object}[ in {area}][ {purpose}]."; requires: subject, verb, object, reason }
    template plain { pattern: "{subject} {verb} {object}[ in {area}][ {purpose}]."; requires: subject, verb, object }
    template bare { pattern: "{subject} {verb}."; requires: subject, verb }
    "#,
    // close to the generation templates, purpose spelled out
    r#"
    template located { pattern: "{subject} {verb} {object} in {area}[ {purpose}][ because {reason}]."; requires: subject, verb, object, area }
    template plain { pattern: "{subject} {verb} {object}[ {purpose}][ because {reason}]."; requires: subject, verb, object }
    template bare { pattern: "{subject} {verb}."; requires: subject, verb }
    "#,
];

/// Restyling vocabulary for reference articles. Deliberately different
/// alternatives than assets/lexicon.tsv so the hybrid system's synonym
/// swaps do not land back on reference wording.
const VARIATION_LEXICON: &str = "\
approved\tratified\tsigned off on\nannounced\tdisclosed\tmade public\n\
extended\tlengthened\tcarried on\nsuspended\tfroze\tput on hold\n\
launched\tkicked off\tset in motion\nconfirmed\tacknowledged\tstood by\n\
rejected\tvetoed\tthrew out\nreviewed\twent over\tlooked into\n\
backed\tstood behind\tgot behind\nopened\tthrew open\tcut the ribbon on\n\
delayed\tpushed back\theld up\npresented\tlaid out\tset out\n\
expanded\tscaled up\tgrew\nadopted\taccepted\tsettled on\n\
new\tlatest\tnewly drafted\nplan\tpackage\nscheme\tprogramme\n\
budget\tspending plan\nrepairs\tmaintenance\nfunding\tbacking\n\
residents\tneighbours\tlocal people\ncampaign\tappeal\nroute\tline\n\
upgrade\tfacelift\ncontract\ttender\ntimetable\trota\nworks\tworksite\n\
rules\tregulations\ncourse\tcurriculum\nhall\tvenue\nlane\ttrack\n\
pipeline\tmain\nbuilding\tpremises\nproject\tdevelopment\ncases\tinfections\n\
extra\tadditional\ttop-up\neuros\teuro\npermits\tlicences\napartments\tflats\n\
jobs\tposts\ntrees\tsaplings\nbuses\tcoaches\nschools\tclassrooms\n\
clinics\twards\nlibraries\tbranch libraries\nshelters\thostels\nmuseums\tgalleries\n\
curb\tcheck\nsupport\tprop up\nspeed\thurry\ncut\tshorten\n\
protect\tlook after\nease\trelieve\nsave\tconserve\nattract\tdraw\n\
outbreak\tspread\nbusinesses\ttraders\nvisitors\tday trippers\nenergy\tpower use\n\
waiting\tqueue\ntraffic\tcongestion\nsharply\tsteeply\ndemand\tuptake\n\
complaints\tobjections\ncosts\texpenses\ninspections\tchecks\nfaults\tdefects\n\
damage\twear\nattendance\tturnout\nseason\tyear\nweather\tconditions\n";

fn variation_rules() -> Vec<TransformRule> {
    vec![TransformRule::FrontBecauseClause]
}

struct EventDraw {
    event: StructuredEvent,
    keyword: String,
}

fn pick<'a>(rng: &mut ChaCha8Rng, pool: &[&'a str]) -> &'a str {
    pool[rng.random_range(0..pool.len())]
}

fn head_word(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .last()
        .unwrap_or(phrase)
        .to_string()
}

fn draw_event(rng: &mut ChaCha8Rng, record_index: usize) -> EventDraw {
    let (subject, subject_keyword) = match rng.random_range(0..4) {
        0 | 1 => {
            let org = pick(rng, &ORGS);
            (org.to_string(), head_word(org))
        }
        2 => {
            let name = pick(rng, &NAMES);
            (
                format!("{} {}", pick(rng, &PERSON_TITLES), name),
                name.to_lowercase(),
            )
        }
        _ => {
            let country = pick(rng, &COUNTRIES);
            (country.to_string(), country.to_lowercase())
        }
    };
    let verb = pick(rng, &VERBS).to_string();
    let (object, object_keyword) = match rng.random_range(0..10) {
        0..=2 => {
            let thing = pick(rng, &NEW_THINGS);
            (format!("a new {thing}"), head_word(thing))
        }
        3 => {
            let thing = pick(rng, &THE_THINGS);
            (format!("the {thing}"), head_word(thing))
        }
        4..=6 => {
            let counted = pick(rng, &COUNTED_THINGS);
            let count = 100 + (record_index * 13 + rng.random_range(0..97)) % 9700;
            (format!("{count} new {counted}"), counted.to_string())
        }
        _ => {
            let place = pick(rng, &FUNDED_PLACES);
            let amount = 1000 + (record_index * 31 + rng.random_range(0..883)) % 8800;
            (
                format!("extra funding of {amount} euros for {place}"),
                place.to_string(),
            )
        }
    };
    let reason = if rng.random_bool(0.5) {
        if rng.random_bool(0.3) {
            format!("{} said on {}", pick(rng, &NAMES), pick(rng, &WEEKDAYS))
        } else {
            pick(rng, &PLAIN_REASONS).to_string()
        }
    } else {
        String::new()
    };
    let purpose = if rng.random_bool(0.35) {
        format!(
            "{} {}",
            pick(rng, &PURPOSE_VERBS),
            pick(rng, &PURPOSE_OBJECTS)
        )
    } else {
        String::new()
    };
    let area = if rng.random_bool(0.4) {
        pick(rng, &AREAS).to_string()
    } else {
        String::new()
    };
    let date = if rng.random_bool(0.3) {
        if rng.random_bool(0.5) {
            pick(rng, &WEEKDAYS).to_string()
        } else {
            format!("{} {}", rng.random_range(1..29), pick(rng, &MONTHS))
        }
    } else {
        String::new()
    };
    let month = if rng.random_bool(0.15) {
        pick(rng, &MONTHS).to_string()
    } else {
        String::new()
    };
    let year = if rng.random_bool(0.15) {
        format!("{}", 2019 + rng.random_range(0..5))
    } else {
        String::new()
    };
    let week = if rng.random_bool(0.1) {
        format!("week {}", rng.random_range(1..53))
    } else {
        String::new()
    };
    let keyword = match rng.random_range(0..4) {
        0 => subject_keyword,
        1 if !area.is_empty() => head_word(&area).to_lowercase(),
        _ => object_keyword,
    };
    let event = StructuredEvent {
        subject,
        verb,
        object,
        reason,
        purpose,
        area,
        date,
        week,
        year,
        month,
    };
    EventDraw { event, keyword }
}

/// Tokens that must keep their capitalization when a sentence gets a
/// marker prefixed: capitalized mid-field tokens and single-token
/// capitalized fields (same convention as the realizer).
fn protected_tokens(event: &StructuredEvent) -> BTreeSet<String> {
    let mut protected = BTreeSet::new();
    for (_, value) in event.fields() {
        let tokens: Vec<&str> = value.split_whitespace().collect();
        for (i, token) in tokens.iter().enumerate() {
            let capitalized = token.chars().next().is_some_and(char::is_uppercase);
            if capitalized && (i > 0 || tokens.len() == 1) {
                protected.insert(
                    token
                        .trim_matches(|c: char| !c.is_alphanumeric())
                        .to_lowercase(),
                );
            }
        }
    }
    protected
}

fn prefix_marker(sentence: &str, marker: &str, protected: &BTreeSet<String>) -> String {
    let mut parts = sentence.splitn(2, ' ');
    let first = parts.next().unwrap_or("");
    let rest = parts.next();
    let core = first
        .trim_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    let acronym = {
        let mut chars = first.chars();
        matches!(
            (chars.next(), chars.next()),
            (Some(a), Some(b)) if a.is_uppercase() && b.is_uppercase()
        )
    };
    let first = if acronym || protected.contains(&core) {
        first.to_string()
    } else {
        let mut chars = first.chars();
        match chars.next() {
            Some(c) => c.to_lowercase().chain(chars).collect(),
            None => String::new(),
        }
    };
    match rest {
        Some(rest) => format!("{marker} {first} {rest}"),
        None => format!("{marker} {first}"),
    }
}

/// Build one reference article: per-sentence frame variants, occasional
/// discourse markers, then lexical variation.
fn build_reference(
    events: &EventSequence,
    frames: &[TemplateSet],
    variation: &LexicalParaphraser,
    seed: u64,
) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sentences = Vec::with_capacity(events.len());
    for (i, event) in events.events().iter().enumerate() {
        let frame = &frames[rng.random_range(0..frames.len())];
        let single = EventSequence::new(vec![event.clone()]).expect("one event");
        let realized = realize(&single, frame, 0).expect("demo events always realize");
        let mut text = realized.sentences()[0].text().to_string();
        if i > 0 && rng.random_bool(0.35) {
            let marker = pick(&mut rng, &HUMAN_CONNECTIVES);
            text = prefix_marker(&text, marker, &protected_tokens(event));
        }
        sentences.push(text);
    }
    let mut varied = Vec::with_capacity(sentences.len());
    for (i, text) in sentences.iter().enumerate() {
        let sentence = newsgen_core::event::Sentence::new(
            text.clone(),
            0,
            newsgen_core::event::Provenance::RuleRealized,
        )
        .expect("stitched sentences are well-formed");
        let doc = newsgen_core::event::Document::new(
            vec![sentence],
            newsgen_core::event::GeneratorTag::Reference,
        )
        .expect("single sentence document");
        let out = paraphrase_document(&doc, variation, seed.rotate_left(i as u32 + 1))
            .expect("lexical variation cannot fail");
        varied.push(out.document.text());
    }
    varied.join(" ")
}

fn main() {
    let manifest_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let assets = manifest_dir.join("../../assets");
    let frames: Vec<TemplateSet> = REFERENCE_FRAMES
        .iter()
        .map(|source| parse_template_set(source).expect("reference frames parse"))
        .collect();

    let variation_lexicon =
        SynonymLexicon::parse_tsv(VARIATION_LEXICON).expect("variation lexicon parses");
    let variation = LexicalParaphraser::new(variation_lexicon, variation_rules())
        .with_replace_probability(0.55);

    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut records = Vec::with_capacity(RECORD_COUNT);
    for record_index in 0..RECORD_COUNT {
        let id = format!("rec{record_index:03}");
        let event_count = rng.random_range(4..=6);
        let mut events = Vec::with_capacity(event_count);
        let mut keywords = Vec::with_capacity(event_count);
        for _ in 0..event_count {
            let draw = draw_event(&mut rng, record_index);
            events.push(draw.event);
            keywords.push(draw.keyword);
        }
        let events = EventSequence::new(events).expect("event list is non-empty");
        let reference = build_reference(&events, &frames, &variation, fnv1a64(&id));
        records.push(CorpusRecord {
            id,
            reference_text: reference,
            events,
            keywords,
        });
    }

    let out_path = assets.join("demo/corpus.jsonl");
    save_corpus(&records, &out_path).expect("corpus written");
    println!("wrote {} records to {}", records.len(), out_path.display());
}
