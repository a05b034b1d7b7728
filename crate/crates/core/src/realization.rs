//! Rendering a plan as recipe text.

use std::fmt;

use crate::compression::{PlanItem, RecipePlan};
use crate::knowledge::{DescriptiveString, Seconds};

/// A window at the end of a plan item during which the cook is free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassiveInterval {
    pub start: Seconds,
    pub end: Seconds,
    /// The host's direction as written before any combination.
    pub activity: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedRecipe {
    pub title: String,
    pub total: Seconds,
    pub ingredients: Vec<String>,
    /// `(start offset, text)` per plan item.
    pub instructions: Vec<(Seconds, String)>,
    pub passives: Vec<PassiveInterval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RealizeOptions {
    /// Put the host's leading verb of a combination in the progressive
    /// ("while boiling the lentils" instead of "while boil the lentils").
    pub gerund: bool,
}

/// Passive windows and the final clock value. Each item's remaining free time
/// sits at the end of the item.
pub fn get_passives(plan: &RecipePlan) -> (Vec<PassiveInterval>, Seconds) {
    let mut clock = 0;
    let mut passives = Vec::new();
    for item in plan.items() {
        clock += item.time();
        let free = item.remaining_f_time();
        if free > 0 {
            passives.push(PassiveInterval {
                start: clock - free,
                end: clock,
                activity: item.host().direction().to_string(),
            });
        }
    }
    (passives, clock)
}

/// Hours, minutes and seconds, dropping zero parts: `3661` is
/// `1 hrs 1 min 1 secs`, `0` is `0 secs`.
pub fn hms(seconds: Seconds) -> String {
    if seconds == 0 {
        return "0 secs".to_string();
    }
    let parts = [
        (seconds / 3600, "hrs"),
        (seconds % 3600 / 60, "min"),
        (seconds % 60, "secs"),
    ];
    parts
        .iter()
        .filter(|(n, _)| *n > 0)
        .map(|(n, unit)| format!("{n} {unit}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn realize(dish: &DescriptiveString, ingred_list: &[DescriptiveString], plan: &RecipePlan) -> RenderedRecipe {
    realize_with(dish, ingred_list, plan, RealizeOptions::default())
}

pub fn realize_with(
    dish: &DescriptiveString,
    ingred_list: &[DescriptiveString],
    plan: &RecipePlan,
    options: RealizeOptions,
) -> RenderedRecipe {
    let mut clock = 0;
    let mut instructions = Vec::with_capacity(plan.len());
    for item in plan.items() {
        instructions.push((clock, instruction_text(item, options)));
        clock += item.time();
    }
    let (passives, total) = get_passives(plan);
    debug_assert_eq!(total, clock);

    let mut ingredients: Vec<String> = Vec::with_capacity(ingred_list.len());
    for i in ingred_list {
        if !ingredients.iter().any(|seen| seen == i.as_str()) {
            ingredients.push(i.to_string());
        }
    }

    RenderedRecipe {
        title: dish.to_string(),
        total,
        ingredients,
        instructions,
        passives,
    }
}

fn instruction_text(item: &PlanItem, options: RealizeOptions) -> String {
    match item {
        PlanItem::Bare(p) => p.direction().to_string(),
        PlanItem::Combined(c) => {
            let host = if options.gerund {
                progressive(c.host_original_direction())
            } else {
                c.host_original_direction().to_string()
            };
            let inner: Vec<&str> = c.insertees().iter().map(|p| p.direction()).collect();
            format!("while {host}, {}", inner.join(" and "))
        }
    }
}

/// Rewrites the leading verb into its -ing form.
fn progressive(direction: &str) -> String {
    let (verb, rest) = match direction.split_once(' ') {
        Some((v, r)) => (v, Some(r)),
        None => (direction, None),
    };
    let ing = gerund(verb);
    match rest {
        Some(r) => format!("{ing} {r}"),
        None => ing,
    }
}

fn gerund(verb: &str) -> String {
    let is_vowel = |c: char| "aeiou".contains(c);
    let chars: Vec<char> = verb.chars().collect();
    let n = chars.len();
    if n == 0 || !chars.iter().all(|c| c.is_ascii_alphabetic()) {
        return verb.to_string();
    }
    if verb.ends_with("ie") {
        return format!("{}ying", &verb[..n - 2]);
    }
    if n > 2 && verb.ends_with('e') && !verb.ends_with("ee") && !verb.ends_with("ye") && !verb.ends_with("oe") {
        return format!("{}ing", &verb[..n - 1]);
    }
    // Single-syllable consonant-vowel-consonant doubles the final consonant.
    let syllables = chars
        .windows(2)
        .filter(|w| !is_vowel(w[0]) && is_vowel(w[1]))
        .count()
        + usize::from(is_vowel(chars[0]));
    if n >= 3
        && syllables == 1
        && !is_vowel(chars[n - 1])
        && !"wxy".contains(chars[n - 1])
        && is_vowel(chars[n - 2])
        && !is_vowel(chars[n - 3])
    {
        return format!("{verb}{}ing", chars[n - 1]);
    }
    format!("{verb}ing")
}

impl fmt::Display for RenderedRecipe {
    /// Fixed layout: title, time, ingredients, timestamped instructions and
    /// passive windows, one entry per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        writeln!(f, "Time: {}", hms(self.total))?;
        writeln!(f, "Ingredients")?;
        for i in &self.ingredients {
            writeln!(f, "{i}")?;
        }
        writeln!(f, "Instructions")?;
        for (at, text) in &self.instructions {
            writeln!(f, "{}: {text}", hms(*at))?;
        }
        writeln!(f, "Passive times:")?;
        for p in &self.passives {
            writeln!(f, "from {} to {} while {}", hms(p.start), hms(p.end), p.activity)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compression::Combination;
    use crate::knowledge::Process;

    fn ds(s: &str) -> DescriptiveString {
        DescriptiveString::new(s).unwrap()
    }

    fn proc(id: &str, time: Seconds, f_time: Seconds, direction: &str) -> Process {
        Process::new(id, [ds(&format!("{id} in"))], [ds(&format!("{id} out"))], time, f_time, direction).unwrap()
    }

    #[test]
    fn hms_table() {
        assert_eq!(hms(3180), "53 min");
        assert_eq!(hms(0), "0 secs");
        assert_eq!(hms(59), "59 secs");
        assert_eq!(hms(3600), "1 hrs");
        assert_eq!(hms(3661), "1 hrs 1 min 1 secs");
        assert_eq!(hms(7205), "2 hrs 5 secs");
    }

    #[test]
    fn passive_sits_at_end_of_item() {
        let plan = RecipePlan::new(vec![PlanItem::Bare(proc("p", 100, 40, "simmer"))]);
        let (passives, clock) = get_passives(&plan);
        assert_eq!(clock, 100);
        assert_eq!(
            passives,
            vec![PassiveInterval {
                start: 60,
                end: 100,
                activity: "simmer".into()
            }]
        );
    }

    #[test]
    fn no_free_time_no_passives() {
        let plan = RecipePlan::new(vec![
            PlanItem::Bare(proc("a", 10, 0, "a")),
            PlanItem::Bare(proc("b", 20, 0, "b")),
        ]);
        assert_eq!(get_passives(&plan), (vec![], 30));
    }

    #[test]
    fn empty_plan_renders_headers_only() {
        let r = realize(&ds("toast"), &[ds("toast")], &RecipePlan::default());
        assert_eq!(
            r.to_string(),
            "toast\nTime: 0 secs\nIngredients\ntoast\nInstructions\nPassive times:\n"
        );
    }

    #[test]
    fn single_insertee_has_no_and() {
        let host = proc("h", 300, 200, "roast the peppers");
        let c = Combination::new(host, vec![proc("c", 60, 0, "slice the bread")]).unwrap();
        let plan = RecipePlan::new(vec![PlanItem::Combined(c)]);
        let r = realize(&ds("lunch"), &[], &plan);
        assert_eq!(r.instructions, vec![(0, "while roast the peppers, slice the bread".to_string())]);
        assert_eq!(r.passives[0].activity, "roast the peppers");
        assert_eq!((r.passives[0].start, r.passives[0].end), (160, 300));
    }

    #[test]
    fn gerund_flag() {
        let host = proc("h", 300, 200, "boil the lentils");
        let c = Combination::new(host, vec![proc("c", 60, 0, "chop the carrot")]).unwrap();
        let plan = RecipePlan::new(vec![PlanItem::Combined(c)]);
        let r = realize_with(&ds("x"), &[], &plan, RealizeOptions { gerund: true });
        assert_eq!(r.instructions[0].1, "while boiling the lentils, chop the carrot");
    }

    #[test]
    fn gerund_forms() {
        for (verb, ing) in [
            ("boil", "boiling"),
            ("chop", "chopping"),
            ("fry", "frying"),
            ("bake", "baking"),
            ("place", "placing"),
            ("stir", "stirring"),
            ("mix", "mixing"),
            ("fill", "filling"),
            ("strain", "straining"),
            ("open", "opening"),
            ("tie", "tying"),
            ("see", "seeing"),
        ] {
            assert_eq!(gerund(verb), ing, "{verb}");
        }
    }
}
