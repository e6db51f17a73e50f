use std::io;
use std::process;

use cantorval::cli;

fn main() {
    let budget = std::env::var_os(cli::BUDGET_ENV);
    let code = cli::run(std::env::args_os(), budget, &mut io::stdout().lock(), &mut io::stderr().lock());
    process::exit(code);
}
