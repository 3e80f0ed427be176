use hkcce::cli::{config::OUT_ENV, main_with_args};

fn main() {
    let env_out = std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(Into::into);
    std::process::exit(main_with_args(std::env::args_os(), env_out));
}
