''' Prompt templates. Text outside the {slots} is fixed and must not be edited. '''


QUESTION_KEYWORDS = (
    'Instruction: Please select all the topics and keywords covered in the following query '
    'and return them as a list with the keywords separated by commas.\n'
    '\n'
    'Example:\n'
    'Question A: When did the people who captured Malakoff come to the region where Philipsburg is located?\n'
    'Answer A:\n'
    "['Philipsburg', 'Malakoff']\n"
    '\n'
    'Question B: When was the first establishment that McDonaldization is named after, '
    'open in the country Horndean is located?\n'
    'Answer B:\n'
    "['McDonaldization', 'Horndean']\n"
    '\n'
    'Question:\n'
    '{question}\n'
    'Answer:'
    )


CHUNK_KEYWORDS = (
    'Instruction: Please extract the five most representative keywords from the following text '
    'and return them as a list with the keywords separated by commas.\n'
    '\n'
    'Example:\n'
    'Text: John Cecil, 6th Earl of Exeter (15 May 1674 \u2013 24 December 1721), known as Lord Burleigh '
    'from 1678 to 1700, was a British peer and Member of Parliament. He was the son of John Cecil, '
    '5th Earl of Exeter, and Anne Cavendish.\n'
    'Answer:\n'
    "['John Cecil, 6th Earl of Exeter', 'Lord Burleigh', 'British peer', 'Member of Parliament', "
    "'John Cecil, 5th Earl of Exeter']\n"
    '\n'
    'Text:\n'
    '{chunk}\n'
    'Answer:'
    )


QUESTION_ANSWERING = (
    'Instruction: Given the following question and contexts, generate a final answer to the question. '
    'Please answer in less than 6 words.\n'
    '\n'
    'Question:\n'
    '{question}\n'
    'Context:\n'
    '{context}\n'
    'Answer:'
    )


NO_RETRIEVAL = (
    'Instruction: Given the following question, generate an answer to the question. '
    'Please answer in less than 6 words.\n'
    '\n'
    'Question:\n'
    '{question}\n'
    'Answer:'
    )


JUDGE = (
    'Instruction: Decide whether the prediction answers the question with the same meaning as '
    'one of the reference answers. Reply with yes or no.\n'
    '\n'
    'Question:\n'
    '{question}\n'
    'References:\n'
    '{references}\n'
    'Prediction:\n'
    '{prediction}\n'
    'Answer:'
    )


def render_question_keywords(question):
    return QUESTION_KEYWORDS.format(question=question)


def render_chunk_keywords(chunk_text):
    return CHUNK_KEYWORDS.format(chunk=chunk_text)


def render_qa(question, context):
    return QUESTION_ANSWERING.format(question=question, context=context)


def render_no_retrieval(question):
    return NO_RETRIEVAL.format(question=question)


def render_judge(question, prediction, golds):
    return JUDGE.format(question=question, references='\n'.join(golds), prediction=prediction)
