//! Shared fixtures for the binary's integration tests: deterministic
//! multilingual text generators and process-spawning helpers.
#![allow(dead_code)]

use std::io::{Read, Write as _};
use std::net::TcpListener;
use std::path::Path;
use std::process::{Command, Output};
use std::thread;

use rand::Rng;

use m2ms_core::seeding::record_rng;
use m2ms_core::textcore::Language;

pub const HI_WORDS: &[&str] = &[
    "समाचार", "सरकार", "भारत", "पानी", "किताब", "शहर", "बाजार", "विद्यालय", "परिवार", "सप्ताह",
    "आकाश", "नदी", "भाषा", "संगीत", "इतिहास", "विज्ञान",
];

pub const ZH_WORDS: &[&str] = &[
    "新闻", "政府", "城市", "经济", "学校", "市场", "家庭", "星期", "水果", "书籍", "历史",
    "科学", "音乐", "语言", "天空", "河流",
];

pub const TH_WORDS: &[&str] = &[
    "ข่าว", "รัฐบาล", "เมือง", "เศรษฐกิจ", "โรงเรียน", "ตลาด", "ครอบครัว", "สัปดาห์", "ผลไม้",
    "หนังสือ", "ประวัติ", "ดนตรี", "ภาษา", "แม่น้ำ", "ท้องฟ้า", "อาหาร",
];

/// Word bank per language. Latin-script languages reuse the vocabulary the
/// identification profiles were trained on, so generated sentences are
/// reliably classifiable.
pub fn word_bank(lang: Language) -> Vec<&'static str> {
    let seed_list = match lang {
        Language::En => include_str!("../../../core/data/seeds/en.txt"),
        Language::Fr => include_str!("../../../core/data/seeds/fr.txt"),
        Language::Tr => include_str!("../../../core/data/seeds/tr.txt"),
        Language::Hi => return HI_WORDS.to_vec(),
        Language::Zh => return ZH_WORDS.to_vec(),
        Language::Th => return TH_WORDS.to_vec(),
    };
    seed_list
        .lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .collect()
}

/// One random sentence with a language-appropriate terminator.
pub fn sentence<R: Rng + ?Sized>(lang: Language, rng: &mut R, n_words: usize) -> String {
    let bank = word_bank(lang);
    let words: Vec<&str> = (0..n_words.max(1))
        .map(|_| bank[rng.gen_range(0..bank.len())])
        .collect();
    match lang {
        Language::Zh => format!("{}。", words.concat()),
        Language::Th => words.concat(),
        _ => format!("{}.", words.join(" ")),
    }
}

/// A multi-sentence document (newline-separated for Thai, which carries no
/// sentence punctuation).
pub fn document<R: Rng + ?Sized>(
    lang: Language,
    rng: &mut R,
    n_sentences: usize,
    words_per_sentence: usize,
) -> String {
    let sentences: Vec<String> = (0..n_sentences.max(1))
        .map(|_| sentence(lang, rng, words_per_sentence))
        .collect();
    let sep = if lang == Language::Th { "\n" } else { " " };
    sentences.join(sep)
}

/// Deterministic generator for a named fixture.
pub fn fixture_rng(label: &str) -> impl Rng {
    record_rng(4242, label)
}

/// Write one JSON value per line.
pub fn write_jsonl(path: &Path, rows: &[serde_json::Value]) {
    let mut text = String::new();
    for row in rows {
        text.push_str(&serde_json::to_string(row).unwrap());
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

/// Read a JSONL file back into values.
pub fn read_jsonl_values(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Parse a JSON document (e.g. a run manifest).
pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(
        &std::fs::read_to_string(path)
            .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display())),
    )
    .unwrap()
}

/// A command handle on the compiled binary, with the provider URL variable
/// scrubbed so ambient environment cannot leak into tests.
pub fn m2ms() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_m2ms"));
    cmd.env_remove("M2MS_PROVIDER_URL");
    cmd
}

/// Run and assert the exit status, echoing output on mismatch.
pub fn run_expecting(cmd: &mut Command, expected: i32) -> Output {
    let output = cmd.output().expect("binary spawns");
    let code = output.status.code();
    assert_eq!(
        code,
        Some(expected),
        "expected exit {expected}, got {code:?}\nstdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr),
    );
    output
}

/// Spawn an HTTP stub that answers every request with the given status and
/// an empty body, forever. The thread dies with the test process.
pub fn spawn_status_server(status: u16) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind ephemeral port");
    let addr = listener.local_addr().unwrap();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            // Read the head plus however much of the body arrives with it;
            // the reply does not depend on the request.
            let mut buf = [0u8; 8192];
            let _ = stream.read(&mut buf);
            let _ = stream.write_all(
                format!(
                    "HTTP/1.1 {status} Stub\r\ncontent-length: 0\r\nconnection: close\r\n\r\n"
                )
                .as_bytes(),
            );
        }
    });
    format!("http://{addr}")
}
