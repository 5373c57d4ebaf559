/* swap ends moving inward */
void string_reverse(char *s)
{
    int i = 0;
    int j = strlen(s) - 1;
    while (i < j) {
        char c = s[i];
        s[i] = s[j];
        s[j] = c;
        i++;
        j--;
    }
}
