void reverseInPlace(char *text)
{
    int len = strlen(text);
    for (int i = 0; i < len / 2; i++) {
        char tmp = text[i];
        text[i] = text[len - 1 - i];
        text[len - 1 - i] = tmp;
    }
}
