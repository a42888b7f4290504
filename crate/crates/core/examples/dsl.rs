//! Parse, print and validate block programs.
//!
//!     cargo run -p llmss --example dsl

use llmss::dsl::{code_tokens, validate_blocks, BlockKind, BlockSet};
use llmss::{parse_code, print_code};

fn main() {
    let src = "repeat(3){move_forward} turn_right repeat_until_goal { if (path_ahead) { move_forward } else { turn_left } }";
    let ast = parse_code(src).expect("valid program");
    println!("canonical form:\n{}\n", print_code(&ast));
    println!("blocks: {}, depth: {}, loops: {}", ast.block_count(), ast.depth(), ast.loop_count());
    println!("tokens: {}", code_tokens(&ast).join(" "));

    let no_loops = BlockSet::from_iter(BlockSet::full().iter().filter(|k| !k.is_loop()));
    let report = validate_blocks(&ast, &no_loops);
    println!("\nvalid without loop blocks: {} {:?}", report.valid, report.violations);
    assert!(BlockSet::full().contains(BlockKind::RepeatUntilGoal));

    match parse_code("move_forward jump") {
        Ok(_) => unreachable!(),
        Err(e) => println!("parse error: {e}"),
    }
}
