//! Hand-authored pilot content: slot catalog, family goal templates, risk
//! rules and the ten scripted consultations.

use inquiry_core::model::{Role, StateLabel, Temporality};

use StateLabel::{Confirmed, Negated, ObservedResult};
use Temporality::{Past, Present, RecentPast};

pub const SECTIONS: [&str; 6] = ["HPI", "ROS", "History", "Medications", "Exam", "Plan"];

/// A record slot and the knowledge object that stands for it.
pub struct SlotDef {
    pub slot: &'static str,
    pub section: &'static str,
    pub text: &'static str,
    /// Rule-pack triggers; each emits `present` as an observed result.
    pub triggers: &'static [&'static str],
}

pub const CATALOG: &[SlotDef] = &[
    // chest
    SlotDef { slot: "chest_pain", section: "HPI", text: "Chest pain or tightness: establish character, onset, duration, exertional pattern and radiation before anything else.", triggers: &["chest pain", "tight feeling in my chest", "pain in the middle of my chest", "chest has been hurting"] },
    SlotDef { slot: "symptom_onset", section: "HPI", text: "Onset: when the complaint first began and whether it started abruptly or gradually.", triggers: &["started this morning", "began three days ago"] },
    SlotDef { slot: "symptom_duration", section: "HPI", text: "Duration of each episode, or whether the pain is constant; episodes over twenty minutes raise concern.", triggers: &["lasts about"] },
    SlotDef { slot: "exertional_worsening", section: "HPI", text: "Pain brought on or worsened by exertion such as stairs or walking uphill is a classic anginal feature.", triggers: &["climb the stairs", "walk uphill"] },
    SlotDef { slot: "pain_radiation", section: "HPI", text: "Radiation of chest pain to the arm, jaw or back; left arm spread is a high-risk descriptor.", triggers: &["left arm"] },
    SlotDef { slot: "pain_character", section: "HPI", text: "Character of pain: pressure, burning, sharp, stabbing or tearing.", triggers: &["burning feeling"] },
    SlotDef { slot: "rest_relief", section: "HPI", text: "Whether chest discomfort eases within minutes of rest; rest relief points towards stable angina.", triggers: &["eases after a few minutes of rest"] },
    SlotDef { slot: "reflux_symptoms", section: "ROS", text: "Acid regurgitation, sour taste or heartburn suggesting reflux disease.", triggers: &["sour taste"] },
    SlotDef { slot: "pain_positional", section: "HPI", text: "Pain that changes with posture or twisting; relief on sitting forward is typical of pericarditis.", triggers: &["sit forward"] },
    SlotDef { slot: "dyspnea", section: "ROS", text: "Shortness of breath or breathlessness at rest or on exertion.", triggers: &["short of breath", "breathless"] },
    SlotDef { slot: "diaphoresis", section: "ROS", text: "Sweating during an episode of chest pain.", triggers: &["sweating"] },
    SlotDef { slot: "nausea", section: "ROS", text: "Nausea or feeling sick without vomiting.", triggers: &["nauseous", "sick to my stomach"] },
    SlotDef { slot: "cough", section: "ROS", text: "Cough, dry or productive, and its timing.", triggers: &["dry cough"] },
    SlotDef { slot: "fever", section: "ROS", text: "Fever or feeling hot, with the highest measured temperature.", triggers: &["fever"] },
    SlotDef { slot: "hypertension", section: "History", text: "Known high blood pressure and its treatment.", triggers: &["high blood pressure"] },
    SlotDef { slot: "smoking_status", section: "History", text: "Smoking: current, former or never, with pack-years.", triggers: &["smoke"] },
    SlotDef { slot: "diabetes", section: "History", text: "Diabetes mellitus, type and control.", triggers: &["type 2 diabetes"] },
    SlotDef { slot: "prior_mi", section: "History", text: "Previous myocardial infarction or heart attack; confirm from discharge letters.", triggers: &["heart attack"] },
    SlotDef { slot: "family_history_cad", section: "History", text: "Premature coronary disease in a first-degree relative.", triggers: &["bypass surgery"] },
    SlotDef { slot: "recent_viral_illness", section: "History", text: "Recent cold or viral illness in the preceding weeks.", triggers: &["had a cold"] },
    SlotDef { slot: "current_medications", section: "Medications", text: "Current medication list with doses, reconciled against the pharmacy record.", triggers: &["i take", "he takes"] },
    SlotDef { slot: "medication_allergy", section: "Medications", text: "Drug allergies and the reaction each one caused.", triggers: &["allergic to"] },
    SlotDef { slot: "aspirin_use", section: "Medications", text: "Aspirin taken regularly or before arrival.", triggers: &["aspirin"] },
    SlotDef { slot: "anticoagulant_use", section: "Medications", text: "Anticoagulants such as warfarin, apixaban or rivaroxaban; affects imaging, procedures and bleeding risk.", triggers: &["blood thinner", "warfarin"] },
    SlotDef { slot: "vitals", section: "Exam", text: "Triage vital signs: blood pressure, heart rate, temperature, oxygen saturation.", triggers: &["triage vitals", "vital signs"] },
    SlotDef { slot: "chest_wall_tenderness", section: "Exam", text: "Reproducible tenderness on pressing the chest wall.", triggers: &["sore when i press"] },
    SlotDef { slot: "ecg", section: "Plan", text: "Twelve-lead electrocardiogram within ten minutes of arrival to look for ischaemic ST changes.", triggers: &["ecg"] },
    SlotDef { slot: "troponin", section: "Plan", text: "High-sensitivity cardiac troponin, repeated at three hours when the first is normal.", triggers: &["troponin"] },
    SlotDef { slot: "chest_xray", section: "Plan", text: "Chest radiograph for effusion, consolidation or widened mediastinum.", triggers: &["x-ray"] },
    // abdominal
    SlotDef { slot: "abdominal_pain", section: "HPI", text: "Abdominal pain: location, onset, migration, relation to meals and associated vomiting.", triggers: &["pain in my upper belly", "stomach hurts", "pain under my ribs"] },
    SlotDef { slot: "pain_location", section: "HPI", text: "Site of abdominal pain by quadrant: epigastric, right upper, right lower.", triggers: &["lower right side"] },
    SlotDef { slot: "vomiting", section: "ROS", text: "Vomiting, frequency and whether it contains blood or bile.", triggers: &["throwing up", "threw up"] },
    SlotDef { slot: "stool_change", section: "ROS", text: "Change in bowel habit, diarrhoea, constipation or pale stools.", triggers: &["bowel"] },
    SlotDef { slot: "urinary_symptoms", section: "ROS", text: "Dysuria, frequency or haematuria pointing to a urinary cause.", triggers: &["burning when i pee"] },
    SlotDef { slot: "anorexia", section: "ROS", text: "Loss of appetite, an early feature of appendicitis.", triggers: &["felt like eating"] },
    SlotDef { slot: "alcohol_use", section: "History", text: "Alcohol intake in units per week and recent binges.", triggers: &["drank a lot", "glass of wine"] },
    SlotDef { slot: "pregnancy_status", section: "History", text: "Possibility of pregnancy before imaging or prescribing.", triggers: &["pregnant"] },
    SlotDef { slot: "gallstone_history", section: "History", text: "Previously documented gallstones on imaging.", triggers: &["gallstones"] },
    SlotDef { slot: "prior_abdominal_surgery", section: "History", text: "Previous abdominal operations, including appendicectomy.", triggers: &["surgery on my tummy"] },
    SlotDef { slot: "nsaid_use", section: "Medications", text: "NSAIDs such as ibuprofen or naproxen; relevant to ulcer, bleeding and kidney risk.", triggers: &["ibuprofen"] },
    SlotDef { slot: "back_radiation", section: "HPI", text: "Epigastric pain boring through to the back, typical of pancreatitis.", triggers: &["through to my back"] },
    SlotDef { slot: "pain_migration", section: "HPI", text: "Pain starting around the umbilicus and moving to the right iliac fossa.", triggers: &["belly button"] },
    SlotDef { slot: "meal_relation", section: "HPI", text: "Pain triggered by eating, particularly fatty meals.", triggers: &["greasy food"] },
    SlotDef { slot: "shoulder_radiation", section: "HPI", text: "Right upper quadrant pain referred to the right shoulder blade.", triggers: &["shoulder blade"] },
    SlotDef { slot: "lipase", section: "Plan", text: "Serum lipase; more than three times the upper limit supports pancreatitis.", triggers: &["lipase"] },
    SlotDef { slot: "abdominal_ultrasound", section: "Plan", text: "Abdominal ultrasound for gallstones, duct dilatation and free fluid.", triggers: &["ultrasound"] },
    SlotDef { slot: "cbc", section: "Plan", text: "Full blood count for leukocytosis.", triggers: &["blood count"] },
    SlotDef { slot: "ct_abdomen", section: "Plan", text: "Contrast CT of the abdomen and pelvis when appendicitis is suspected in adults.", triggers: &["ct shows an inflamed appendix"] },
    // acute presentations
    SlotDef { slot: "headache", section: "HPI", text: "Headache: onset speed, severity, worst-ever quality and associated features.", triggers: &["headache"] },
    SlotDef { slot: "headache_onset_sudden", section: "HPI", text: "Thunderclap onset reaching maximum intensity within a minute.", triggers: &["came on suddenly"] },
    SlotDef { slot: "onset_during_exertion", section: "HPI", text: "Headache beginning during exertion, straining or intercourse.", triggers: &["lifting weights"] },
    SlotDef { slot: "photophobia", section: "ROS", text: "Discomfort from light.", triggers: &["light hurts"] },
    SlotDef { slot: "neck_stiffness", section: "ROS", text: "Neck stiffness or meningism.", triggers: &["neck feels stiff"] },
    SlotDef { slot: "neuro_deficit", section: "ROS", text: "Focal weakness, numbness, speech or visual disturbance.", triggers: &["weakness"] },
    SlotDef { slot: "migraine_history", section: "History", text: "Established migraine diagnosis and usual pattern.", triggers: &["migraine"] },
    SlotDef { slot: "pleuritic_pain", section: "HPI", text: "Sharp chest pain on inspiration.", triggers: &["when i breathe in"] },
    SlotDef { slot: "leg_swelling", section: "ROS", text: "Unilateral calf or leg swelling.", triggers: &["calf is swollen"] },
    SlotDef { slot: "calf_tenderness", section: "Exam", text: "Tenderness along the deep veins of the calf.", triggers: &["squeeze my calf"] },
    SlotDef { slot: "hemoptysis", section: "ROS", text: "Coughing up blood.", triggers: &["coughed up blood"] },
    SlotDef { slot: "recent_travel", section: "History", text: "Long-haul travel or immobility in the last four weeks.", triggers: &["flew back"] },
    SlotDef { slot: "prior_dvt", section: "History", text: "Previous deep vein thrombosis or pulmonary embolism.", triggers: &["clot in my leg"] },
    SlotDef { slot: "oral_contraceptive_use", section: "Medications", text: "Combined oral contraceptive or other oestrogen therapy.", triggers: &["on the pill"] },
    SlotDef { slot: "sore_throat", section: "HPI", text: "Sore throat: duration, severity and ability to swallow.", triggers: &["throat is really sore"] },
    SlotDef { slot: "swallowing_difficulty", section: "ROS", text: "Pain or difficulty swallowing, drooling.", triggers: &["hurts to swallow"] },
    SlotDef { slot: "voice_change", section: "ROS", text: "Muffled or hot-potato voice suggesting peritonsillar abscess.", triggers: &["voice"] },
    SlotDef { slot: "tonsillar_exudate", section: "Exam", text: "White exudate on the tonsils.", triggers: &["white spots"] },
    SlotDef { slot: "lymph_node_swelling", section: "Exam", text: "Tender anterior cervical lymph nodes.", triggers: &["glands in my neck"] },
    SlotDef { slot: "sick_contact", section: "History", text: "Close contacts with a similar or diagnosed infection.", triggers: &["roommate"] },
    SlotDef { slot: "penicillin_allergy", section: "Medications", text: "Penicillin allergy and reaction type, needed before prescribing antibiotics.", triggers: &["allergic to penicillin"] },
    SlotDef { slot: "ct_head", section: "Plan", text: "Non-contrast CT head within six hours of a thunderclap headache.", triggers: &["ct head"] },
    SlotDef { slot: "lumbar_puncture", section: "Plan", text: "Lumbar puncture for xanthochromia when CT is negative or delayed.", triggers: &["lumbar puncture"] },
    SlotDef { slot: "d_dimer", section: "Plan", text: "D-dimer in patients with low or intermediate pretest probability of embolism.", triggers: &["d-dimer"] },
    SlotDef { slot: "ct_angiography", section: "Plan", text: "CT pulmonary angiography to confirm or exclude pulmonary embolism.", triggers: &["angiography"] },
    SlotDef { slot: "rapid_strep_test", section: "Plan", text: "Rapid antigen detection test for group A streptococcus.", triggers: &["strep test"] },
    SlotDef { slot: "throat_culture", section: "Plan", text: "Throat swab culture when the rapid test is negative or confirmation is needed.", triggers: &["throat culture"] },
];

/// Membership of a slot in a family goal template.
pub struct FamSlot {
    pub slot: &'static str,
    pub mandatory: bool,
    pub risk: bool,
}

const fn m(slot: &'static str) -> FamSlot {
    FamSlot { slot, mandatory: true, risk: false }
}
const fn mr(slot: &'static str) -> FamSlot {
    FamSlot { slot, mandatory: true, risk: true }
}
const fn o(slot: &'static str) -> FamSlot {
    FamSlot { slot, mandatory: false, risk: false }
}
const fn or(slot: &'static str) -> FamSlot {
    FamSlot { slot, mandatory: false, risk: true }
}

pub struct RuleDef {
    pub id: &'static str,
    pub description: &'static str,
    pub antecedent: &'static [&'static str],
    pub discharge: &'static [&'static str],
    pub severity: f64,
    pub text: &'static str,
}

pub struct Family {
    pub id: &'static str,
    pub slots: Vec<FamSlot>,
    pub rules: Vec<RuleDef>,
}

pub fn families() -> Vec<Family> {
    vec![
        Family {
            id: "chest",
            slots: vec![
                m("chest_pain"), m("symptom_onset"), m("symptom_duration"), mr("exertional_worsening"),
                mr("pain_radiation"), m("pain_character"), o("rest_relief"), o("pain_positional"),
                m("dyspnea"), m("diaphoresis"), o("nausea"), o("cough"), o("reflux_symptoms"), m("fever"),
                m("hypertension"), m("smoking_status"), m("diabetes"), or("prior_mi"), or("family_history_cad"),
                o("recent_viral_illness"), m("current_medications"), mr("medication_allergy"), o("aspirin_use"),
                or("anticoagulant_use"), m("vitals"), o("chest_wall_tenderness"),
            ],
            rules: vec![
                RuleDef { id: "acs_exertional", description: "Exertional chest pain: ECG and troponin before discharge", antecedent: &["chest_pain", "exertional_worsening"], discharge: &["ecg", "troponin"], severity: 2.0, text: "Chest pain provoked by exertion must be treated as possible acute coronary syndrome until an ECG and troponin are available." },
                RuleDef { id: "acs_radiating", description: "Radiating chest pain: ECG required", antecedent: &["chest_pain", "pain_radiation"], discharge: &["ecg"], severity: 1.5, text: "Chest pain radiating to the arm or jaw requires an ECG without delay." },
                RuleDef { id: "chest_fever", description: "Chest pain with fever: ECG and chest radiograph", antecedent: &["chest_pain", "fever"], discharge: &["ecg", "chest_xray"], severity: 1.5, text: "Chest pain with fever needs an ECG for pericarditis and a chest radiograph for pneumonia." },
            ],
        },
        Family {
            id: "abdominal",
            slots: vec![
                m("abdominal_pain"), mr("pain_location"), m("symptom_onset"), m("symptom_duration"),
                o("back_radiation"), o("pain_migration"), o("meal_relation"), o("shoulder_radiation"),
                mr("vomiting"), mr("fever"), m("stool_change"), m("urinary_symptoms"), o("nausea"), o("anorexia"),
                m("alcohol_use"), mr("pregnancy_status"), o("gallstone_history"), o("prior_abdominal_surgery"),
                m("current_medications"), m("medication_allergy"), or("nsaid_use"), or("anticoagulant_use"),
                m("vitals"),
            ],
            rules: vec![
                RuleDef { id: "pancreatobiliary_check", description: "Abdominal pain with vomiting: lipase and ultrasound", antecedent: &["abdominal_pain", "vomiting"], discharge: &["lipase", "abdominal_ultrasound"], severity: 2.0, text: "Abdominal pain with vomiting calls for a serum lipase and an abdominal ultrasound to exclude pancreatitis and biliary obstruction." },
                RuleDef { id: "appendicitis_check", description: "Abdominal pain with fever: blood count and CT", antecedent: &["abdominal_pain", "fever"], discharge: &["cbc", "ct_abdomen"], severity: 2.0, text: "Abdominal pain with fever needs a blood count and cross-sectional imaging to exclude appendicitis or abscess." },
            ],
        },
        Family {
            id: "acute",
            slots: vec![
                m("headache"), mr("headache_onset_sudden"), o("onset_during_exertion"), o("photophobia"),
                mr("neck_stiffness"), mr("neuro_deficit"), m("fever"), m("symptom_onset"), m("symptom_duration"),
                m("vomiting"), m("smoking_status"), m("dyspnea"), mr("pleuritic_pain"), mr("leg_swelling"),
                o("calf_tenderness"), m("cough"), m("hemoptysis"), or("recent_travel"), or("prior_dvt"),
                o("oral_contraceptive_use"), m("sore_throat"), mr("swallowing_difficulty"), mr("voice_change"),
                o("tonsillar_exudate"), o("lymph_node_swelling"), o("sick_contact"), or("penicillin_allergy"),
                o("migraine_history"), m("current_medications"), m("medication_allergy"), or("anticoagulant_use"),
                m("vitals"),
            ],
            rules: vec![
                RuleDef { id: "sah_check", description: "Thunderclap headache: CT head and lumbar puncture", antecedent: &["headache", "headache_onset_sudden"], discharge: &["ct_head", "lumbar_puncture"], severity: 2.0, text: "A sudden severe headache is a subarachnoid haemorrhage until CT head and lumbar puncture say otherwise." },
                RuleDef { id: "pe_check", description: "Breathlessness with leg swelling: D-dimer and CT angiography", antecedent: &["dyspnea", "leg_swelling"], discharge: &["d_dimer", "ct_angiography"], severity: 2.0, text: "Breathlessness with a swollen leg requires D-dimer and CT pulmonary angiography to exclude embolism." },
                RuleDef { id: "pharyngitis_check", description: "Sore throat with fever: strep testing", antecedent: &["sore_throat", "fever"], discharge: &["rapid_strep_test", "throat_culture"], severity: 1.5, text: "Sore throat with fever warrants rapid strep testing and culture before antibiotics are chosen." },
            ],
        },
    ]
}

/// How an item reaches the conversation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Src {
    /// Volunteered in scripted turn `n`.
    Said(usize),
    /// Volunteered uncertainly in turn `n`; the scripted reply confirms it.
    Unsure(usize),
    /// Only given when the system asks.
    Elicit,
    /// Result reported once the system recommends the exam.
    Exam,
    /// Only given when asked; the slot sits on a knowledge path.
    Path,
}

pub struct Item {
    pub slot: &'static str,
    pub value: &'static str,
    pub state: StateLabel,
    pub temporality: Temporality,
    pub phrase: &'static str,
    pub reply: &'static str,
    pub src: Src,
}

fn said(t: usize, slot: &'static str, value: &'static str, state: StateLabel, temporality: Temporality, phrase: &'static str) -> Item {
    Item { slot, value, state, temporality, phrase, reply: "", src: Src::Said(t) }
}
fn obs(t: usize, slot: &'static str, value: &'static str, phrase: &'static str) -> Item {
    said(t, slot, value, ObservedResult, Present, phrase)
}
fn neg(t: usize, slot: &'static str, phrase: &'static str) -> Item {
    said(t, slot, "present", Negated, Present, phrase)
}
fn unsure(t: usize, slot: &'static str, value: &'static str, temporality: Temporality, phrase: &'static str, reply: &'static str) -> Item {
    Item { slot, value, state: Confirmed, temporality, phrase, reply, src: Src::Unsure(t) }
}
fn elicit(slot: &'static str, value: &'static str, state: StateLabel, reply: &'static str) -> Item {
    Item { slot, value, state, temporality: Present, phrase: "", reply, src: Src::Elicit }
}
fn exam(slot: &'static str, value: &'static str, reply: &'static str) -> Item {
    Item { slot, value, state: ObservedResult, temporality: Present, phrase: "", reply, src: Src::Exam }
}
fn path(slot: &'static str, value: &'static str, state: StateLabel, reply: &'static str) -> Item {
    Item { slot, value, state, temporality: Present, phrase: "", reply, src: Src::Path }
}

pub struct Spec {
    pub id: &'static str,
    pub family: &'static str,
    pub title: &'static str,
    /// (id, label, prior); the first is the working diagnosis the script
    /// bears out, the second its main competitor.
    pub hypotheses: [(&'static str, &'static str, f64); 3],
    /// Items that favour the competitor rather than the working diagnosis.
    pub decoys: &'static [&'static str],
    /// Volunteered finding the path item refines in the knowledge graph.
    pub path_anchor: &'static str,
    pub speakers: [Role; 5],
    pub items: Vec<Item>,
}

use Role::{Family as Fam, Patient as Pt, Report as Rep};

pub fn scenarios() -> Vec<Spec> {
    vec![
        Spec {
            id: "chest_01",
            family: "chest",
            title: "Exertional chest tightness radiating to the left arm",
            hypotheses: [("acs", "Acute coronary syndrome", 0.4), ("gerd", "Gastro-oesophageal reflux", 0.3), ("chest_wall_strain", "Musculoskeletal chest wall pain", 0.3)],
            decoys: &["nausea"],
            path_anchor: "exertional_worsening",
            speakers: [Pt, Pt, Pt, Fam, Rep],
            items: vec![
                obs(0, "chest_pain", "present", "I've had a tight feeling in my chest,"),
                obs(0, "symptom_onset", "this_morning", "it started this morning."),
                obs(1, "exertional_worsening", "present", "It gets worse when I climb the stairs"),
                obs(1, "pain_radiation", "left_arm", "and it spreads down my left arm."),
                unsure(1, "prior_mi", "present", Past, "I might have had a small heart attack a few years ago, I'm not sure.", "Looking at my discharge letter, yes, I had a heart attack in 2019."),
                neg(2, "dyspnea", "I'm not short of breath."),
                said(2, "diaphoresis", "present", ObservedResult, RecentPast, "I was sweating a lot earlier."),
                obs(2, "nausea", "present", "I feel a little sick to my stomach."),
                said(3, "hypertension", "present", Confirmed, Past, "He has been on treatment for high blood pressure for years."),
                unsure(3, "aspirin_use", "aspirin_81mg", Present, "I think he takes an aspirin, but I'm not certain.", "I checked his pill box: he takes aspirin 81 mg every day."),
                obs(3, "current_medications", "amlodipine", "He takes amlodipine every morning."),
                obs(4, "vitals", "bp=152/94;hr=98", "Triage vitals: blood pressure 152/94, heart rate 98."),
                elicit("symptom_duration", "20_minutes", ObservedResult, "Each episode lasts about twenty minutes."),
                elicit("smoking_status", "current_smoker", ObservedResult, "I smoke about a pack a day."),
                elicit("medication_allergy", "penicillin", ObservedResult, "I'm allergic to penicillin, it gives me a rash."),
                path("rest_relief", "present", ObservedResult, "It eases after a few minutes of rest."),
                exam("ecg", "st_depression", "The ECG shows ST depression in the lateral leads."),
                exam("troponin", "normal", "The first troponin came back normal."),
            ],
        },
        Spec {
            id: "chest_02",
            family: "chest",
            title: "Burning central chest pain after meals",
            hypotheses: [("gerd", "Gastro-oesophageal reflux", 0.4), ("acs", "Acute coronary syndrome", 0.35), ("chest_wall_strain", "Musculoskeletal chest wall pain", 0.25)],
            decoys: &["exertional_worsening", "diabetes"],
            path_anchor: "pain_character",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "chest_pain", "present", "I get a pain in the middle of my chest"),
                said(0, "symptom_onset", "two_weeks_ago", ObservedResult, RecentPast, "that started about two weeks ago."),
                obs(1, "pain_character", "burning", "It's a burning feeling,"),
                obs(1, "exertional_worsening", "present", "and sometimes it comes on when I walk uphill after dinner."),
                neg(1, "pain_radiation", "It doesn't go anywhere else."),
                neg(2, "dyspnea", "No trouble breathing."),
                unsure(2, "aspirin_use", "present", Present, "I may have been taking aspirin for headaches, I don't remember.", "Yes, I've been taking aspirin most days for my headaches."),
                obs(2, "cough", "dry_nocturnal", "I've had a dry cough at night."),
                said(3, "smoking_status", "former_smoker", Confirmed, Past, "I quit smoking ten years ago."),
                said(3, "diabetes", "type_2", Confirmed, Past, "I have type 2 diabetes."),
                unsure(3, "anticoagulant_use", "apixaban", Present, "I might be on a blood thinner, I'd have to check.", "My pharmacy list shows I take apixaban."),
                obs(4, "vitals", "bp=128/80;hr=76", "Triage vitals: blood pressure 128/80, heart rate 76."),
                elicit("symptom_duration", "2_hours", ObservedResult, "It can last a couple of hours."),
                elicit("current_medications", "omeprazole", ObservedResult, "I take omeprazole when it's bad."),
                elicit("medication_allergy", "drug_allergy", Negated, "I'm not allergic to any medicines."),
                path("reflux_symptoms", "present", ObservedResult, "Yes, I often get a sour taste coming up into my mouth."),
                exam("ecg", "normal_sinus_rhythm", "The ECG is normal, sinus rhythm with no ST changes."),
                exam("troponin", "normal", "The troponin is within normal limits."),
            ],
        },
        Spec {
            id: "chest_03",
            family: "chest",
            title: "Right-sided chest pain after lifting",
            hypotheses: [("chest_wall_strain", "Musculoskeletal chest wall pain", 0.45), ("acs", "Acute coronary syndrome", 0.3), ("gerd", "Gastro-oesophageal reflux", 0.25)],
            decoys: &["exertional_worsening"],
            path_anchor: "chest_wall_tenderness",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "chest_pain", "present", "My chest has been hurting on the right side"),
                said(0, "symptom_onset", "yesterday", ObservedResult, RecentPast, "since yesterday afternoon."),
                obs(1, "pain_character", "sharp", "It's a sharp pain"),
                obs(1, "exertional_worsening", "present", "and it hurts more when I move or carry things,"),
                obs(1, "chest_wall_tenderness", "present", "and it's sore when I press on it."),
                neg(2, "pain_radiation", "It stays in one spot."),
                neg(2, "diaphoresis", "No sweating."),
                unsure(2, "family_history_cad", "present", Past, "My father might have had heart trouble, I'm not sure.", "My mother confirmed my father had bypass surgery at 55."),
                neg(3, "hypertension", "I don't have high blood pressure."),
                obs(3, "current_medications", "ibuprofen", "I've been taking ibuprofen for it."),
                unsure(3, "aspirin_use", "present", RecentPast, "I may have taken an aspirin this morning.", "Yes, I took one aspirin this morning."),
                obs(4, "vitals", "bp=124/78;hr=72", "Triage vitals: blood pressure 124/78, heart rate 72."),
                elicit("symptom_duration", "constant", ObservedResult, "It's been there constantly since it started."),
                elicit("smoking_status", "never_smoker", ObservedResult, "I've never smoked."),
                elicit("medication_allergy", "codeine", ObservedResult, "Codeine makes me vomit, so I avoid it."),
                path("pain_positional", "present", ObservedResult, "It hurts more when I twist my body."),
                exam("ecg", "normal_sinus_rhythm", "The ECG is normal."),
                exam("troponin", "normal", "Troponin is negative."),
            ],
        },
        Spec {
            id: "chest_04",
            family: "chest",
            title: "Sharp positional chest pain with fever",
            hypotheses: [("pericarditis", "Acute pericarditis", 0.4), ("pneumonia", "Community-acquired pneumonia", 0.3), ("acs", "Acute coronary syndrome", 0.3)],
            decoys: &["dyspnea"],
            path_anchor: "fever",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "chest_pain", "present", "I have a sharp pain in my chest"),
                said(0, "symptom_onset", "three_days_ago", ObservedResult, RecentPast, "that began three days ago."),
                obs(1, "pain_positional", "present", "It's worse when I lie flat and better when I sit forward."),
                obs(1, "fever", "present", "I've had a fever too."),
                neg(2, "exertional_worsening", "Walking doesn't make it worse."),
                neg(2, "pain_radiation", "It doesn't spread to my arms."),
                obs(2, "dyspnea", "present", "I get a bit breathless."),
                unsure(2, "recent_viral_illness", "present", RecentPast, "I think I had a cold last week, maybe.", "Yes, I had a cold with a sore throat last week."),
                neg(3, "diabetes", "I don't have diabetes."),
                obs(3, "current_medications", "paracetamol", "I've been taking paracetamol for the fever."),
                unsure(3, "anticoagulant_use", "rivaroxaban", Present, "I might be on a blood thinner after my knee surgery, not sure.", "The surgeon's letter says rivaroxaban for six weeks, and I'm still taking it."),
                obs(4, "vitals", "temp=38.2;hr=104", "Triage vitals: temperature 38.2, heart rate 104."),
                elicit("symptom_duration", "constant", ObservedResult, "It's there all the time."),
                elicit("pain_character", "stabbing", ObservedResult, "It's stabbing, and worse when I take a deep breath."),
                elicit("medication_allergy", "sulfa", ObservedResult, "I'm allergic to sulfa drugs."),
                path("cough", "present", Negated, "No, I don't have a cough."),
                exam("ecg", "diffuse_st_elevation", "The ECG shows diffuse ST elevation with PR depression."),
                exam("chest_xray", "clear", "The chest X-ray is clear."),
            ],
        },
        Spec {
            id: "abd_01",
            family: "abdominal",
            title: "Epigastric pain and vomiting after a weekend of drinking",
            hypotheses: [("pancreatitis", "Acute pancreatitis", 0.4), ("gastritis", "Alcohol-related gastritis", 0.35), ("biliary_colic", "Biliary colic", 0.25)],
            decoys: &["nausea"],
            path_anchor: "alcohol_use",
            speakers: [Pt, Pt, Pt, Fam, Rep],
            items: vec![
                obs(0, "abdominal_pain", "present", "I have really bad pain"),
                obs(0, "pain_location", "epigastric", "right in the upper middle of my belly."),
                said(1, "symptom_onset", "last_night", ObservedResult, RecentPast, "It started last night"),
                obs(1, "vomiting", "present", "and I've been throwing up since."),
                neg(2, "fever", "I don't think I have a fever."),
                said(2, "alcohol_use", "heavy", ObservedResult, RecentPast, "I drank a lot at a party on the weekend."),
                unsure(2, "gallstone_history", "present", Past, "I might have had gallstones once, a doctor mentioned it.", "My records say gallstones were seen on a scan in 2021."),
                neg(3, "stool_change", "Her bowels have been normal."),
                unsure(3, "nsaid_use", "ibuprofen", RecentPast, "She may have been taking ibuprofen for the pain.", "Yes, she has taken ibuprofen three times a day since Saturday."),
                obs(3, "nausea", "present", "She's been feeling nauseous all day."),
                neg(3, "urinary_symptoms", "No problems passing urine."),
                obs(4, "vitals", "bp=110/70;hr=112", "Triage vitals: blood pressure 110/70, heart rate 112."),
                elicit("symptom_duration", "constant", ObservedResult, "The pain has been constant since last night."),
                elicit("current_medications", "oral_contraceptive", ObservedResult, "I only take the contraceptive pill."),
                elicit("medication_allergy", "morphine", ObservedResult, "I'm allergic to morphine, it makes me itch."),
                path("back_radiation", "present", ObservedResult, "Yes, it goes straight through to my back."),
                exam("lipase", "elevated", "The lipase is elevated at three times normal."),
                exam("abdominal_ultrasound", "no_gallstones", "The ultrasound shows no gallstones and no duct dilatation."),
            ],
        },
        Spec {
            id: "abd_02",
            family: "abdominal",
            title: "Right lower quadrant pain with fever",
            hypotheses: [("appendicitis", "Acute appendicitis", 0.45), ("gastroenteritis", "Viral gastroenteritis", 0.35), ("mesenteric_adenitis", "Mesenteric adenitis", 0.2)],
            decoys: &["anorexia"],
            path_anchor: "pain_location",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "abdominal_pain", "present", "My stomach hurts"),
                said(0, "symptom_onset", "yesterday", ObservedResult, RecentPast, "since yesterday."),
                obs(1, "pain_location", "right_lower_quadrant", "Now it's mostly down on the lower right side,"),
                obs(1, "fever", "present", "and I've had a fever of 38.5 at home."),
                neg(2, "vomiting", "I haven't vomited."),
                neg(2, "stool_change", "My bowel movements are normal."),
                unsure(2, "prior_abdominal_surgery", "hernia_repair", Past, "I might have had my appendix checked as a kid, not sure if they took it out.", "My mom says they never removed it, I only had a hernia repair."),
                neg(3, "alcohol_use", "I don't drink."),
                obs(3, "current_medications", "cetirizine", "I just take cetirizine for allergies."),
                unsure(3, "nsaid_use", "ibuprofen", RecentPast, "I might have taken some ibuprofen earlier.", "Yes, I took 400 mg of ibuprofen this morning."),
                obs(3, "anorexia", "present", "I haven't felt like eating."),
                obs(4, "vitals", "temp=38.4;hr=102", "Triage vitals: temperature 38.4, heart rate 102."),
                elicit("symptom_duration", "constant", ObservedResult, "It's been constant since it moved."),
                elicit("medication_allergy", "amoxicillin", ObservedResult, "I'm allergic to amoxicillin."),
                elicit("urinary_symptoms", "present", Negated, "No burning when I pee."),
                path("pain_migration", "present", ObservedResult, "It started around my belly button and then moved to the right."),
                exam("cbc", "leukocytosis", "The blood count shows a raised white cell count."),
                exam("ct_abdomen", "inflamed_appendix", "The CT shows an inflamed appendix."),
            ],
        },
        Spec {
            id: "abd_03",
            family: "abdominal",
            title: "Recurrent right upper quadrant pain after fatty meals",
            hypotheses: [("biliary_colic", "Biliary colic", 0.4), ("pancreatitis", "Acute pancreatitis", 0.3), ("peptic_ulcer", "Peptic ulcer disease", 0.3)],
            decoys: &["vomiting"],
            path_anchor: "meal_relation",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "abdominal_pain", "present", "I keep getting pain under my ribs"),
                obs(0, "pain_location", "right_upper_quadrant", "on the right side."),
                obs(1, "meal_relation", "fatty_meals", "It comes on after I eat greasy food."),
                said(1, "vomiting", "present", ObservedResult, RecentPast, "Last night I threw up twice."),
                neg(2, "fever", "No fever."),
                said(2, "symptom_onset", "three_months_ago", ObservedResult, Past, "These attacks started about three months ago."),
                neg(2, "pregnancy_status", "I'm not pregnant, I had my period last week."),
                unsure(2, "gallstone_history", "present", Past, "A scan years ago might have shown gallstones, I can't remember.", "The old scan report says multiple gallstones."),
                obs(3, "alcohol_use", "occasional", "I have a glass of wine at the weekend."),
                obs(3, "current_medications", "levothyroxine", "I take levothyroxine."),
                unsure(3, "prior_abdominal_surgery", "pyloromyotomy", Past, "I had some surgery on my tummy as a baby, I don't know what.", "My mother says it was a pyloric stenosis operation."),
                obs(4, "vitals", "bp=130/82;hr=88", "Triage vitals: blood pressure 130/82, heart rate 88."),
                elicit("symptom_duration", "1_to_2_hours", ObservedResult, "Each attack lasts one or two hours."),
                elicit("stool_change", "present", Negated, "My stools look normal."),
                elicit("medication_allergy", "drug_allergy", Negated, "No allergies to any medicines."),
                path("shoulder_radiation", "present", ObservedResult, "Sometimes it goes up to my right shoulder blade."),
                exam("lipase", "normal", "The lipase is normal."),
                exam("abdominal_ultrasound", "gallstones", "Ultrasound shows gallstones without gallbladder wall thickening."),
            ],
        },
        Spec {
            id: "acute_01",
            family: "acute",
            title: "Sudden severe headache at the gym",
            hypotheses: [("sah", "Subarachnoid haemorrhage", 0.35), ("migraine", "Migraine", 0.4), ("tension_headache", "Tension-type headache", 0.25)],
            decoys: &["photophobia"],
            path_anchor: "headache_onset_sudden",
            speakers: [Pt, Pt, Pt, Fam, Rep],
            items: vec![
                obs(0, "headache", "worst_ever", "I have the worst headache of my life."),
                obs(0, "headache_onset_sudden", "present", "It came on suddenly, like being hit."),
                said(1, "symptom_onset", "two_hours_ago", ObservedResult, RecentPast, "That was about two hours ago,"),
                obs(1, "symptom_duration", "constant", "and it hasn't eased at all since."),
                obs(1, "photophobia", "present", "The light hurts my eyes."),
                obs(2, "neck_stiffness", "present", "My neck feels stiff."),
                neg(2, "fever", "I don't feel feverish."),
                unsure(2, "migraine_history", "present", Past, "I might have had migraines when I was younger.", "Yes, my GP diagnosed migraine when I was twenty."),
                neg(3, "neuro_deficit", "He hasn't had any weakness or trouble speaking."),
                obs(3, "current_medications", "atorvastatin", "He takes atorvastatin."),
                unsure(3, "anticoagulant_use", "warfarin", Present, "He might be on a blood thinner, I'm not sure.", "The pharmacy confirms he takes warfarin."),
                obs(4, "vitals", "bp=178/96;hr=64", "Triage vitals: blood pressure 178/96, heart rate 64."),
                elicit("medication_allergy", "aspirin", ObservedResult, "I'm allergic to aspirin."),
                elicit("vomiting", "present", ObservedResult, "I've vomited once."),
                elicit("smoking_status", "occasional_smoker", ObservedResult, "I smoke occasionally."),
                path("onset_during_exertion", "present", ObservedResult, "It started while I was lifting weights at the gym."),
                exam("ct_head", "subarachnoid_blood", "The CT head shows subarachnoid blood."),
                exam("lumbar_puncture", "xanthochromia", "The lumbar puncture shows xanthochromia."),
            ],
        },
        Spec {
            id: "acute_02",
            family: "acute",
            title: "Breathlessness and calf swelling after a long flight",
            hypotheses: [("pe", "Pulmonary embolism", 0.35), ("pneumonia", "Community-acquired pneumonia", 0.3), ("anxiety", "Anxiety with hyperventilation", 0.35)],
            decoys: &["symptom_onset"],
            path_anchor: "leg_swelling",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "dyspnea", "present", "I've been short of breath"),
                said(0, "symptom_onset", "yesterday", ObservedResult, RecentPast, "since yesterday."),
                obs(1, "pleuritic_pain", "present", "It hurts on the right when I breathe in."),
                said(1, "recent_travel", "long_haul_flight", ObservedResult, RecentPast, "I flew back from Australia three days ago."),
                obs(1, "symptom_duration", "constant", "It's there all the time, even at rest."),
                obs(2, "leg_swelling", "left_calf", "My left calf is swollen."),
                neg(2, "cough", "I'm not coughing."),
                unsure(2, "oral_contraceptive_use", "combined_pill", Present, "I think I'm still on the pill, the one my doctor changed.", "Yes, I'm on the combined pill."),
                neg(3, "fever", "No fever."),
                obs(3, "current_medications", "salbutamol", "I use a salbutamol inhaler sometimes."),
                unsure(3, "prior_dvt", "present", Past, "I might have had a clot in my leg after my last baby.", "The hospital letter confirms a DVT in 2020."),
                obs(4, "vitals", "spo2=91;hr=118", "Triage vitals: oxygen saturation 91 percent, heart rate 118."),
                elicit("medication_allergy", "erythromycin", ObservedResult, "I'm allergic to erythromycin."),
                elicit("smoking_status", "never_smoker", ObservedResult, "I've never smoked."),
                elicit("hemoptysis", "present", Negated, "No, I haven't coughed up blood."),
                path("calf_tenderness", "present", ObservedResult, "Yes, it's tender when I squeeze my calf."),
                exam("d_dimer", "elevated", "The D-dimer is raised."),
                exam("ct_angiography", "pulmonary_embolism", "CT angiography shows a right lower lobe pulmonary embolus."),
            ],
        },
        Spec {
            id: "acute_03",
            family: "acute",
            title: "Sore throat and fever with a possible penicillin allergy",
            hypotheses: [("strep_pharyngitis", "Streptococcal pharyngitis", 0.4), ("viral_pharyngitis", "Viral pharyngitis", 0.45), ("mononucleosis", "Infectious mononucleosis", 0.15)],
            decoys: &["sick_contact"],
            path_anchor: "tonsillar_exudate",
            speakers: [Pt, Pt, Pt, Pt, Rep],
            items: vec![
                obs(0, "sore_throat", "present", "My throat is really sore"),
                obs(0, "fever", "present", "and I've had a fever."),
                said(1, "symptom_onset", "three_days_ago", ObservedResult, RecentPast, "It all started three days ago."),
                neg(1, "cough", "I don't have a cough."),
                obs(1, "tonsillar_exudate", "present", "I can see white spots at the back of my throat."),
                obs(2, "swallowing_difficulty", "present", "It hurts to swallow."),
                neg(2, "neck_stiffness", "My neck isn't stiff."),
                unsure(2, "penicillin_allergy", "hives", Past, "I might be allergic to penicillin, I got a rash once as a kid.", "My records confirm a penicillin allergy with hives."),
                obs(3, "current_medications", "ibuprofen", "I've taken ibuprofen for the pain."),
                neg(3, "smoking_status", "I don't smoke."),
                unsure(3, "sick_contact", "glandular_fever", RecentPast, "My roommate might have had glandular fever, not sure.", "Yes, my roommate was diagnosed with glandular fever last month."),
                obs(4, "vitals", "temp=38.9;hr=100", "Triage vitals: temperature 38.9, heart rate 100."),
                elicit("symptom_duration", "constant", ObservedResult, "It's constant, worse in the morning."),
                elicit("vomiting", "present", Negated, "No vomiting."),
                elicit("voice_change", "present", Negated, "My voice sounds normal."),
                path("lymph_node_swelling", "present", ObservedResult, "Yes, the glands in my neck are swollen and tender."),
                exam("rapid_strep_test", "positive", "The rapid strep test is positive."),
                exam("throat_culture", "group_a_strep", "The throat culture grew group A streptococcus."),
            ],
        },
    ]
}

/// Off-topic or loosely related reference material the retriever must rank
/// below the objects that matter.
pub const DISTRACTORS: &[&str] = &[
    "Smoking cessation counselling: offer varenicline or nicotine replacement and refer to a stop-smoking service.",
    "Blood pressure targets in chronic hypertension management for adults under eighty.",
    "Annual diabetes review: HbA1c, foot examination, retinal screening and kidney function.",
    "Influenza vaccination schedule for adults over sixty-five and at-risk groups.",
    "Travel advice: malaria prophylaxis and vaccination before visiting tropical regions.",
    "Oral rehydration for children with diarrhoea and mild dehydration.",
    "Back pain in working adults: stay active, simple analgesia, review at six weeks.",
    "Gout flare management with colchicine or NSAIDs and later urate lowering.",
    "Asthma action plan: reliever inhaler use and when to seek urgent care.",
    "Seasonal allergic rhinitis treated with antihistamines and nasal steroids.",
    "Insomnia: sleep hygiene advice before considering hypnotics.",
    "Iron deficiency anaemia: check ferritin and look for a source of blood loss.",
    "Urinary tract infection in women: nitrofurantoin for three days when uncomplicated.",
    "Contraception counselling: options, efficacy and interactions with other medicines.",
    "Statin therapy for primary prevention when ten-year cardiovascular risk exceeds ten percent.",
    "Healthy eating guidance: fibre, fruit and vegetables, limiting saturated fat.",
    "Alcohol brief intervention: weekly units, binge patterns and referral options.",
    "Heartburn in pregnancy: antacids and lifestyle measures first.",
    "Tension headache self-care: regular sleep, hydration and limiting analgesic overuse.",
    "Common cold: rest, fluids and paracetamol; antibiotics do not help.",
    "Migraine prophylaxis with propranolol or topiramate when attacks are frequent.",
    "Chronic cough: review ACE inhibitors, reflux and postnasal drip.",
    "Anxiety and panic attacks: breathing techniques and talking therapies.",
    "Constipation in older adults: fluids, fibre and osmotic laxatives.",
    "Medication review in polypharmacy: stop drugs without a clear indication.",
    "Ankle sprain: rest, ice, compression and graded return to activity.",
    "Eczema flare: emollients and short courses of topical steroids.",
    "Shingles: antiviral therapy within three days of rash onset.",
    "Pre-operative assessment checklist: fasting, anticoagulant plans and allergies.",
    "Discharge letter template: diagnosis, medication changes and follow-up plan.",
];
