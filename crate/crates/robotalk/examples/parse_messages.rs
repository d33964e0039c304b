//! Tour of the message grammar: parse the protocol's sentence templates,
//! render them back, and resolve who a message is for.
//!
//! ```bash
//! cargo run -p robotalk --example parse_messages
//! ```

use robotalk::grammar::{parse_message, render_message, resolve_addressee, RobotId};

fn main() {
    let utterances = [
        // The greeting that opens every conversation.
        "Hi, I am Rob",
        // A coordinator telling a specific robot what to do.
        "Hi, Rob, I am Bot, water the yellow rose",
        // Volunteers claiming numbered tasks in front of their team.
        "Hi, team plant, I am X, I will complete task: 1",
        "Hello team plant, I am Y, I will complete task: 2",
        // A status broadcast with team membership.
        "Hi all, I am X, member of Team A, completing task: water the red rose",
        // The same claim as the speech-to-text engine actually hears it:
        // no punctuation, no casing.
        "hello team plant i am y i will complete task 2",
        // A completion report.
        "Hi team plant, I am Bot, I have completed task: 2",
    ];

    for text in utterances {
        match parse_message(text) {
            Ok(message) => {
                println!("  in: {text}");
                println!("form: {:?} from {}", message.body, message.speaker);
                println!(" out: {}", render_message(&message));
                println!();
            }
            Err(err) => println!("  in: {text}\n err: {err}\n"),
        }
    }

    // Addressing: "team plant" reaches its members, "all" reaches everyone.
    let rob = RobotId::new("Rob").unwrap();
    let groups = vec!["team plant".to_string()];
    for text in [
        "Hi, I am Bot",
        "Hi Rob, I am Bot, water the yellow rose",
        "Hi Bot, I am X, water the yellow rose",
        "Hi team plant, I am Y, I will complete task: 3",
    ] {
        let message = parse_message(text).unwrap();
        println!(
            "for Rob? {:5} <- {text}",
            resolve_addressee(&message.addressee, &rob, &groups)
        );
    }

    // Rejections carry the reason.
    for bad in ["", "Hi, Rob, water the rose", "greetings, I am Rob"] {
        println!("reject {:?}: {}", bad, parse_message(bad).unwrap_err());
    }
}
