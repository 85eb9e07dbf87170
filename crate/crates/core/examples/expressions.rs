//! Parse, normalize and evaluate bra-ket expressions.

use modval::expr::{evaluate, parse_expression, EvalContext, Value};

fn main() {
    let ctx = EvalContext::default();
    let inputs = [
        "(|0> + |1>)/sqrt(2)",
        "-i(|H>|L> + |V>|R>)/sqrt(2)",
        "sx ⊗ I",
        "proj(|H>) - proj(|V>)",
        "|0> + sx",
        "(|0> +",
    ];
    for src in inputs {
        match parse_expression(src) {
            Err(e) => println!("{src:<30} ! {e}"),
            Ok(ast) => match evaluate(&ast, &ctx) {
                Ok(Value::Scalar(z)) => println!("{src:<30} = scalar {z}"),
                Ok(Value::Ket(k)) => {
                    let amps: Vec<String> = k.amplitudes().iter().map(|a| format!("{a:.4}")).collect();
                    println!("{src:<30} = ket [{}]  normal form: {ast}", amps.join(", "))
                }
                Ok(Value::Operator(o)) => println!("{src:<30} = {}x{} operator  normal form: {ast}", o.dim(), o.dim()),
                Err(e) => println!("{src:<30} ! {e}"),
            },
        }
    }
}
