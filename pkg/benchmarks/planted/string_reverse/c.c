/* reverse with explicit end scan, no library calls */
void revString(char *p)
{
    int n = 0;
    while (p[n] != '\0')
        n++;
    int a = 0;
    int b = n - 1;
    while (a < b) {
        char t = p[a];
        p[a] = p[b];
        p[b] = t;
        a++;
        b--;
    }
}
