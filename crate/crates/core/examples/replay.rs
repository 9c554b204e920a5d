//! Drives the command-line front end as a library: every replay, plus the
//! same replay as JSON.
//!
//! `cargo run --example replay -- [section]`

use brouwer::cli::dispatch;

fn main() {
    let sections: Vec<String> = match std::env::args().nth(1) {
        Some(s) => vec![s],
        None => ["vienna-9", "drift-11", "ks-12", "cambridge-13"].map(String::from).to_vec(),
    };
    let mut worst = 0;
    for s in &sections {
        let out = dispatch(["brouwer", "replay", s]);
        print!("{}{}", out.stdout, out.stderr);
        println!("exit {}\n", out.code);
        worst = worst.max(out.code);
    }
    let json = dispatch(["brouwer", "replay", &sections[0], "--json"]);
    println!("{} bytes of JSON for {}", json.stdout.len(), sections[0]);
    std::process::exit(worst);
}
