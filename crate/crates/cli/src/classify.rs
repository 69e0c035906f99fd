use crate::error::CliError;
use crate::output::{csv_string, json_string, write_file};
use crate::{ClassifyArgs, Format};
use lzlab_core::engine::{classify, CoefficientQuad, FieldTag, Verdict};
use serde::Serialize;

#[derive(Serialize)]
struct Report<'a> {
    command: &'static str,
    field: String,
    quad: &'a str,
    iid: bool,
    verdict: &'a Verdict,
}

#[derive(Serialize)]
struct Row<'a> {
    field: String,
    quad: &'a str,
    iid: bool,
    outcome: &'static str,
    case: String,
    counterexample: String,
    partial_xi1_xi4: bool,
    requires_iid: bool,
    citation: &'static str,
    label: String,
}

pub fn run(args: &ClassifyArgs) -> Result<(), CliError> {
    let field: FieldTag = args.field.parse()?;
    let quad = CoefficientQuad::parse(field, &args.quad)?;
    let verdict = classify(&quad, args.iid)?;
    let report = Report {
        command: "classify",
        field: field.to_string(),
        quad: &args.quad,
        iid: args.iid,
        verdict: &verdict,
    };
    let json = json_string(&report)?;
    if let Some(path) = &args.out {
        write_file(path, &json)?;
    }
    let text = match args.format {
        Format::Json => json,
        Format::Csv => csv_string(&[Row {
            field: field.to_string(),
            quad: &args.quad,
            iid: args.iid,
            outcome: verdict.outcome.tag(),
            case: verdict.case().map(|c| format!("{c:?}")).unwrap_or_default(),
            counterexample: verdict
                .recipe()
                .map(|r| format!("{r:?}").to_lowercase())
                .unwrap_or_default(),
            partial_xi1_xi4: verdict.partial_xi1_xi4,
            requires_iid: verdict.requires_iid_23,
            citation: verdict.citation,
            label: verdict.label(),
        }])?,
        Format::Human => human(&verdict, &args.quad, args.iid),
    };
    print!("{text}");
    Ok(())
}

fn human(v: &Verdict, quad: &str, iid: bool) -> String {
    let yes = |b: bool| if b { "yes" } else { "no" };
    let mut s = format!("{}\n", v.label());
    s += &format!("  field                {}\n", v.field);
    s += &format!("  quad                 {quad}\n");
    s += &format!("  iid flag             {}\n", yes(iid));
    s += &format!("  ξ1, ξ4 up to shift   {}\n", yes(v.partial_xi1_xi4));
    s += &format!("  needs ξ2, ξ3 iid     {}\n", yes(v.requires_iid_23));
    if let Some(r) = v.recipe() {
        s += &format!(
            "  counterexample       {}\n",
            format!("{r:?}").to_lowercase()
        );
    }
    s
}
