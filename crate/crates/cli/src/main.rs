mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use io::UsageError;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SolveMatrix(a) => commands::solve_matrix(a),
        Command::SolveEfg(a) => commands::solve_efg(a),
        Command::GenGame(a) => commands::gen_game(a),
        Command::TrainLeague(a) => commands::train(a, false),
        Command::TrainAt(a) => commands::train(a, true),
        Command::Eval(a) => commands::eval(a),
        Command::MctsPlay(a) => commands::mcts_play(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
