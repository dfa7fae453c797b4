use std::io::{BufRead, Write};

use unicorn_core::game::{Action, DeviceMode, Game, GameStatus, RoundOutcome, Variant};

use crate::error::Result;

const RULE: &str = "=====================";
const ACTION_PROMPT: &str = "[up,down,quit]: ";

enum Input {
    Act(Action),
    Quit,
}

/// Reads one line, trimmed. `None` at end of input.
fn read_line<R: BufRead>(input: &mut R) -> Result<Option<String>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    Ok(Some(line.trim().to_string()))
}

fn is_quit(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "q" | "quit")
}

fn prompt_action<R: BufRead, W: Write>(input: &mut R, out: &mut W) -> Result<Input> {
    loop {
        write!(out, "{ACTION_PROMPT}")?;
        out.flush()?;
        let Some(line) = read_line(input)? else {
            writeln!(out)?;
            return Ok(Input::Quit);
        };
        if is_quit(&line) {
            return Ok(Input::Quit);
        }
        match line.parse::<Action>() {
            Ok(a) => return Ok(Input::Act(a)),
            Err(_) => writeln!(out, "Please type up, down or quit.")?,
        }
    }
}

fn banner<W: Write>(out: &mut W, game: &Game) -> Result<()> {
    let s = game.state();
    writeln!(out)?;
    writeln!(out, "{RULE}")?;
    writeln!(out, "-[ Altitude {} feet ]-", s.altitude)?;
    writeln!(
        out,
        "{}",
        unicorn_core::game::status_message(s.altitude, s.goal, &s.player_name)
    )?;
    Ok(())
}

/// Plays the pending jewel encounter to the end. Returns false if the
/// player quit or input ran out.
fn encounter<R: BufRead, W: Write>(game: &mut Game, input: &mut R, out: &mut W) -> Result<bool> {
    writeln!(out)?;
    writeln!(out, "A mischievous cloud challenges you to find the unicorn jewel!")?;
    while let Some(round) = game.pending() {
        let choices = round.jewel_names().join(",");
        writeln!(out, "Round {}. Which unicorn jewel is the real one?", round.round)?;
        let guess = loop {
            write!(out, "[{choices}]: ")?;
            out.flush()?;
            let Some(line) = read_line(input)? else {
                writeln!(out)?;
                return Ok(false);
            };
            if is_quit(&line) {
                return Ok(false);
            }
            let line = line.to_ascii_lowercase();
            if round.jewel_names().contains(&line.as_str()) {
                break line;
            }
            writeln!(out, "That is not one of the jewels.")?;
        };
        let reward = game.config().encounter_reward;
        let entry = game.guess(&guess)?;
        let g = &entry.guess;
        writeln!(
            out,
            "{}",
            if g.player_correct {
                "You guessed right!"
            } else {
                "You guessed wrong."
            }
        )?;
        if let Some(grover) = &g.grover {
            writeln!(out, "Measurements after 1 iteration of Grover search:")?;
            writeln!(out, "{}", grover.counts)?;
            writeln!(
                out,
                "Maximum outcome: {} ({})",
                grover.counts.bitstring(grover.argmax),
                grover.argmax
            )?;
        }
        if let Some(c) = &g.computer_guess {
            writeln!(out, "The mischievous cloud guesses {c}.")?;
        }
        match g.outcome {
            RoundOutcome::PlayerWon => writeln!(out, "You found the real jewel and gain {reward} feet.")?,
            RoundOutcome::ComputerWon => {
                let secret = g.secret_jewel.as_deref().unwrap_or("?");
                writeln!(
                    out,
                    "The cloud found the real jewel, the {secret}. You lose {reward} feet."
                )?;
            }
            RoundOutcome::Ongoing => {}
        }
    }
    Ok(true)
}

/// Runs the interactive game until it is won, the player quits, or input
/// ends. Everything printed depends only on the game seed and the input.
pub fn play_loop<R: BufRead, W: Write>(game: &mut Game, input: &mut R, out: &mut W) -> Result<()> {
    let variant = game.config().variant;
    let computer = match variant {
        Variant::Quantum => "a quantum computer",
        Variant::Classical => "a classical computer",
    };
    writeln!(out, "Your unicorn, {}, is ready for flight!", game.state().player_name)?;
    writeln!(out, "Use the keyboard to fly up/down on {computer},")?;
    writeln!(out, "as you ascend your way into the castle.")?;
    writeln!(out, "Goal: {} feet.", game.state().goal)?;

    loop {
        banner(out, game)?;
        if game.state().status == GameStatus::Won {
            writeln!(out, "You won in {} turns!", game.state().turn)?;
            break;
        }
        let action = match prompt_action(input, out)? {
            Input::Act(a) => a,
            Input::Quit => {
                game.quit();
                writeln!(out, "Goodbye.")?;
                break;
            }
        };
        let record = game.act(action)?;
        writeln!(
            out,
            "{}",
            match action {
                Action::Up => "You soar into the sky.",
                Action::Down => "You dive toward the ground.",
            }
        )?;
        match variant {
            Variant::Quantum => {
                writeln!(
                    out,
                    "Running on the {}.",
                    match game.config().device_mode {
                        DeviceMode::Simulator => "simulator",
                        DeviceMode::HardwareEmulation => "hardware emulator",
                    }
                )?;
                if let Some(counts) = &record.counts {
                    writeln!(out, "{counts}")?;
                }
            }
            Variant::Classical => {
                if let Some(roll) = record.roll {
                    writeln!(out, "The wind adds {roll} feet of drift.")?;
                }
            }
        }
        if game.pending().is_some() && !encounter(game, input, out)? {
            game.quit();
            writeln!(out, "Goodbye.")?;
            break;
        }
    }
    out.flush()?;
    Ok(())
}
