"""Tabular data behind the four comparison panels (one DataFrame per panel, no rendering)."""

import pandas as pd


def _settings(summaries):
    return [s for s in ("cs", "as") if s in summaries]


def author_publications_panel(summaries):
    """
    Publications of every author, one column per setting.

    Args:
        summaries: dict of setting value ("cs"/"as") to RunSummary

    Returns:
        DataFrame with one row per author
    """
    settings = _settings(summaries)
    first = summaries[settings[0]]
    data = {
        "author_id": [a.id for a in first.per_author],
        "archetype": [a.archetype for a in first.per_author],
    }
    for s in settings:
        data[f"{s}_publications"] = [a.publications for a in summaries[s].per_author]
    return pd.DataFrame(data)


def author_mean_impact_panel(summaries):
    """Mean impact of every author, one column per setting."""
    settings = _settings(summaries)
    first = summaries[settings[0]]
    data = {
        "author_id": [a.id for a in first.per_author],
        "archetype": [a.archetype for a in first.per_author],
    }
    for s in settings:
        data[f"{s}_mean_impact"] = [a.mean_impact for a in summaries[s].per_author]
    return pd.DataFrame(data)


def months_to_publication_panel(frames):
    """Months from creation to publication of every published manuscript."""
    parts = []
    for s in ("cs", "as"):
        if s not in frames:
            continue
        frame = frames[s]
        published = frame[frame["outcome"] == "published"]
        parts.append(pd.DataFrame({
            "setting": s,
            "manuscript_id": published["id"].to_numpy(),
            "months": (published["outcome_month"] - published["created_month"]).astype("int64").to_numpy(),
        }))
    if not parts:
        return pd.DataFrame(columns=["setting", "manuscript_id", "months"])
    return pd.concat(parts, ignore_index=True)


def journal_publications_panel(summaries):
    # publications per journal next to its impact quartile
    settings = _settings(summaries)
    first = summaries[settings[0]]
    data = {
        "journal_id": [j.id for j in first.per_journal],
        "archetype": [j.archetype for j in first.per_journal],
        "impact": [j.impact for j in first.per_journal],
        "impact_quartile": [j.impact_quartile for j in first.per_journal],
    }
    for s in settings:
        data[f"{s}_publications"] = [j.publications for j in summaries[s].per_journal]
    return pd.DataFrame(data)


PANELS = {
    "author_publications": author_publications_panel,
    "author_mean_impact": author_mean_impact_panel,
    "journal_publications": journal_publications_panel,
}
