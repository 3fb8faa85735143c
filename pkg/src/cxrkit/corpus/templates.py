"""Shipped instruction templates: ten per task family.

Template text is original. Each template carries exactly the placeholders its
task requires; the compiler samples one template per record.
"""

from __future__ import annotations

from .tasks import task_spec
from .types import InstructionTemplate

TEMPLATES = {
    "view_classification": [
        "What view was this chest radiograph acquired in? Options: {options}.",
        "Identify the imaging view of this chest X-ray. Options: {options}.",
        "Classify the projection of the provided radiograph. Options: {options}.",
        "Which view does this study show? Options: {options}.",
        "Determine the radiographic view. Options: {options}.",
        "From the image, select the acquisition view. Options: {options}.",
        "Name the view used for this chest film. Options: {options}.",
        "Pick the view that matches this radiograph. Options: {options}.",
        "State the imaging projection for this study. Options: {options}.",
        "Choose the correct view for the image shown. Options: {options}.",
    ],
    "disease_binary": [
        "Is there evidence of {finding} in this chest X-ray? Options: {options}.",
        "Does this radiograph show {finding}? Options: {options}.",
        "Assess the image for {finding}. Options: {options}.",
        "Can {finding} be seen in the provided study? Options: {options}.",
        "Based on the image, is {finding} present? Options: {options}.",
        "Review the chest film: is {finding} visible? Options: {options}.",
        "Determine whether the image demonstrates {finding}. Options: {options}.",
        "Is {finding} identifiable on this radiograph? Options: {options}.",
        "Does the study contain findings of {finding}? Options: {options}.",
        "Answer whether {finding} appears in this image. Options: {options}.",
    ],
    "disease_single": [
        "Which finding is present in this chest X-ray? Options: {options}.",
        "Identify the finding shown in the image. Options: {options}.",
        "Select the abnormality visible on this radiograph. Options: {options}.",
        "What single finding does this study demonstrate? Options: {options}.",
        "Choose the finding that matches the image. Options: {options}.",
        "Name the abnormality seen in this chest film. Options: {options}.",
        "Pick the finding depicted in the radiograph. Options: {options}.",
        "Which of these findings appears in the image? Options: {options}.",
        "Determine the finding present in this study. Options: {options}.",
        "From the image, select the observed finding. Options: {options}.",
    ],
    "disease_multi": [
        "Which set of findings is present in this chest X-ray? Options: {options}.",
        "Identify the combination of findings shown. Options: {options}.",
        "Select the group of abnormalities visible in the image. Options: {options}.",
        "What findings does this study demonstrate? Options: {options}.",
        "Choose the finding set that matches the radiograph. Options: {options}.",
        "Name the collection of findings in this chest film. Options: {options}.",
        "Pick the set of findings depicted here. Options: {options}.",
        "Which option lists the findings in the image? Options: {options}.",
        "Determine the findings present in this study. Options: {options}.",
        "From the image, select the full set of findings. Options: {options}.",
    ],
    "temporal_classification": [
        "Comparing the prior and current studies, how has the {finding} changed? Options: {options}.",
        "Given two studies over time, assess the progression of {finding}. Options: {options}.",
        "How did the {finding} evolve between these two images? Options: {options}.",
        "Judge the interval change of {finding} across the studies. Options: {options}.",
        "Between the earlier and later films, what happened to the {finding}? Options: {options}.",
        "Describe the course of {finding} from the first to the second image. Options: {options}.",
        "Assess whether the {finding} progressed between studies. Options: {options}.",
        "What is the interval change in {finding}? Options: {options}.",
        "Compare the two radiographs with respect to {finding}. Options: {options}.",
        "Over the two timepoints shown, how did the {finding} change? Options: {options}.",
    ],
    "phrase_grounding": [
        "Locate the following finding in the image: {phrase}. Reply with a bounding box.",
        "Ground this phrase to an image region: {phrase}. Answer with box coordinates.",
        "Mark the region corresponding to: {phrase}. Provide a bounding box.",
        "Where in the image is this finding: {phrase}? Respond with a box.",
        "Identify the image region for the phrase: {phrase}. Give box coordinates.",
        "Draw a bounding box around: {phrase}.",
        "Point out the location of: {phrase}. Use a bounding box.",
        "Localize the finding described by: {phrase}. Reply with a box.",
        "Provide the bounding box for: {phrase}.",
        "Find and box the region matching: {phrase}.",
    ],
    "vqa": [
        "{phrase} Options: {options}.",
        "Question: {phrase} Options: {options}.",
        "Answer this question about the image: {phrase} Options: {options}.",
        "Based on the radiograph: {phrase} Options: {options}.",
        "Consider the image and answer: {phrase} Options: {options}.",
        "Using the chest film, answer: {phrase} Options: {options}.",
        "Please answer: {phrase} Options: {options}.",
        "Regarding this study: {phrase} Options: {options}.",
        "From the image: {phrase} Options: {options}.",
        "Examine the radiograph. {phrase} Options: {options}.",
    ],
    "findings_generation": [
        "Write the findings section of the radiology report for this chest X-ray.",
        "Generate the findings for the provided radiograph.",
        "Describe the findings visible in this study.",
        "Draft the findings section for this image.",
        "Compose the findings paragraph of the report.",
        "Report the findings for this chest film.",
        "Provide a findings section describing this radiograph.",
        "Document the findings seen in the image.",
        "Produce the findings portion of the radiology report.",
        "Summarize what the image shows as a findings section.",
    ],
    "findings_summarization": [
        "Summarize the following findings into an impression: {findings_section}",
        "Write the impression for these findings: {findings_section}",
        "Condense the findings below into an impression: {findings_section}",
        "Given the findings, produce the impression: {findings_section}",
        "Draft an impression from this findings section: {findings_section}",
        "Turn these findings into a brief impression: {findings_section}",
        "Provide the impression corresponding to: {findings_section}",
        "Compose the impression for the findings: {findings_section}",
        "From the findings below, state the impression: {findings_section}",
        "Reduce the following findings to an impression: {findings_section}",
    ],
    "image_text_matching": [
        "Does this report text describe the image? Text: {phrase} Options: {options}.",
        "Is the following description consistent with the radiograph? {phrase} Options: {options}.",
        "Decide whether the text matches the image. Text: {phrase} Options: {options}.",
        "Does the image correspond to this report? {phrase} Options: {options}.",
        "Check if the description fits the study: {phrase} Options: {options}.",
        "Is this findings text from the shown image? {phrase} Options: {options}.",
        "Judge whether the report matches the film. Report: {phrase} Options: {options}.",
        "Does the text below belong to this image? {phrase} Options: {options}.",
        "Assess the match between image and text: {phrase} Options: {options}.",
        "Report: {phrase} Does it describe this image? Options: {options}.",
    ],
}


def templates_for(task_id: str) -> list:
    """Validated InstructionTemplate list for a task (1..10 per task)."""
    spec = task_spec(task_id)
    texts = TEMPLATES.get(task_id)
    if not texts:
        raise ValueError(f"no templates shipped for {task_id!r}")
    if not 1 <= len(texts) <= 10:
        raise ValueError(f"{task_id}: template count {len(texts)} outside 1..10")
    templates = [InstructionTemplate(task_id, t) for t in texts]
    for t in templates:
        if t.placeholders() != spec.placeholders:
            raise ValueError(
                f"{task_id}: template placeholders {sorted(t.placeholders())} "
                f"!= required {sorted(spec.placeholders)}"
            )
    return templates
